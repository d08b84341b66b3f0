/* Length-prefixed packet framing over a stream transport. */

#include <stdint.h>
#include <string.h>

#define FRAME_MAGIC 0x5a
#define FRAME_HEADER_LEN 4
#define FRAME_MAX_PAYLOAD 4096

enum frame_error {
    FRAME_OK = 0,
    FRAME_INCOMPLETE = 1,
    FRAME_BAD_MAGIC = -1,
    FRAME_TOO_LARGE = -2,
};

struct frame {
    uint8_t type;
    uint16_t len;
    const uint8_t *payload;
};

/* Header layout: magic(1) type(1) len(2, big-endian). */
int frame_decode(const uint8_t *buf, size_t avail, struct frame *out,
                 size_t *consumed)
{
    if (avail < FRAME_HEADER_LEN)
        return FRAME_INCOMPLETE;
    if (buf[0] != FRAME_MAGIC)
        return FRAME_BAD_MAGIC;
    uint16_t len = (uint16_t)buf[2] << 8 | buf[3];
    if (len > FRAME_MAX_PAYLOAD)
        return FRAME_TOO_LARGE;
    if (avail < FRAME_HEADER_LEN + (size_t)len)
        return FRAME_INCOMPLETE;
    out->type = buf[1];
    out->len = len;
    out->payload = buf + FRAME_HEADER_LEN;
    *consumed = FRAME_HEADER_LEN + len;
    return FRAME_OK;
}

size_t frame_encode(uint8_t type, const uint8_t *payload, uint16_t len,
                    uint8_t *dst, size_t cap)
{
    size_t need = FRAME_HEADER_LEN + (size_t)len;
    if (len > FRAME_MAX_PAYLOAD || cap < need)
        return 0;
    dst[0] = FRAME_MAGIC;
    dst[1] = type;
    dst[2] = (uint8_t)(len >> 8);
    dst[3] = (uint8_t)len;
    memcpy(dst + FRAME_HEADER_LEN, payload, len);
    return need;
}
