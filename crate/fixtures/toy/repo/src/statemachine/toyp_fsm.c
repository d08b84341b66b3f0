/* TOYP session state machine. */

#include "toyp_msg.h"

enum toyp_state {
    TOYP_STATE_IDLE,
    TOYP_STATE_SESSION,
    TOYP_STATE_CLOSED,
};

struct toyp_session {
    enum toyp_state state;
    unsigned int seq;
};

static void toyp_enter(struct toyp_session *s, enum toyp_state next)
{
    s->state = next;
}

int toyp_handle_message(struct toyp_session *s, enum toyp_msg_type msg)
{
    switch (s->state) {
    case TOYP_STATE_IDLE:
        if (msg == TOYP_MSG_HELLO) {
            toyp_enter(s, TOYP_STATE_SESSION);
            return 0;
        }
        break;
    case TOYP_STATE_SESSION:
        if (msg == TOYP_MSG_DATA) {
            s->seq++;
            return 0;
        }
        if (msg == TOYP_MSG_BYE) {
            toyp_enter(s, TOYP_STATE_CLOSED);
            return 0;
        }
        break;
    case TOYP_STATE_CLOSED:
        break;
    }
    return -1;
}
