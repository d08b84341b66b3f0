/* Connection lifecycle tracking for a line-based server. */

#include <stddef.h>
#include <time.h>

enum conn_state {
    CONN_ACCEPTED,
    CONN_GREETING_SENT,
    CONN_AUTHENTICATED,
    CONN_STREAMING,
    CONN_DRAINING,
    CONN_CLOSED,
};

enum conn_event {
    EV_GREET,
    EV_AUTH_OK,
    EV_AUTH_FAIL,
    EV_DATA_BEGIN,
    EV_DATA_END,
    EV_QUIT,
    EV_TIMEOUT,
};

struct connection {
    enum conn_state state;
    time_t last_activity;
    unsigned int auth_failures;
};

static const char *state_names[] = {
    [CONN_ACCEPTED] = "accepted",
    [CONN_GREETING_SENT] = "greeting-sent",
    [CONN_AUTHENTICATED] = "authenticated",
    [CONN_STREAMING] = "streaming",
    [CONN_DRAINING] = "draining",
    [CONN_CLOSED] = "closed",
};

const char *conn_state_name(enum conn_state state)
{
    if (state > CONN_CLOSED)
        return "unknown";
    return state_names[state];
}

int conn_apply_event(struct connection *conn, enum conn_event event)
{
    conn->last_activity = time(NULL);
    switch (conn->state) {
    case CONN_ACCEPTED:
        if (event == EV_GREET) {
            conn->state = CONN_GREETING_SENT;
            return 0;
        }
        break;
    case CONN_GREETING_SENT:
        if (event == EV_AUTH_OK) {
            conn->state = CONN_AUTHENTICATED;
            return 0;
        }
        if (event == EV_AUTH_FAIL) {
            if (++conn->auth_failures >= 3)
                conn->state = CONN_CLOSED;
            return 0;
        }
        break;
    case CONN_AUTHENTICATED:
        if (event == EV_DATA_BEGIN) {
            conn->state = CONN_STREAMING;
            return 0;
        }
        if (event == EV_QUIT) {
            conn->state = CONN_DRAINING;
            return 0;
        }
        break;
    case CONN_STREAMING:
        if (event == EV_DATA_END) {
            conn->state = CONN_AUTHENTICATED;
            return 0;
        }
        break;
    case CONN_DRAINING:
        if (event == EV_TIMEOUT) {
            conn->state = CONN_CLOSED;
            return 0;
        }
        break;
    case CONN_CLOSED:
        break;
    }
    if (event == EV_TIMEOUT) {
        conn->state = CONN_CLOSED;
        return 0;
    }
    return -1;
}
