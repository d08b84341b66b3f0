/* TOYP wire message types. */

#ifndef TOYP_MSG_H
#define TOYP_MSG_H

enum toyp_msg_type {
    TOYP_MSG_HELLO = 1,
    TOYP_MSG_DATA = 2,
    TOYP_MSG_BYE = 3,
};

const char *toyp_msg_name(enum toyp_msg_type msg);

#endif
