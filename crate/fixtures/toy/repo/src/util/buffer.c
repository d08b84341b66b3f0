/* Growable byte buffer. */

#include <stdlib.h>
#include <string.h>

struct buffer {
    unsigned char *bytes;
    size_t len;
    size_t cap;
};

int buffer_reserve(struct buffer *b, size_t extra)
{
    size_t want = b->len + extra;
    if (want <= b->cap)
        return 0;
    size_t cap = b->cap ? b->cap * 2 : 64;
    while (cap < want)
        cap *= 2;
    unsigned char *bytes = realloc(b->bytes, cap);
    if (!bytes)
        return -1;
    b->bytes = bytes;
    b->cap = cap;
    return 0;
}

int buffer_append(struct buffer *b, const void *data, size_t len)
{
    if (buffer_reserve(b, len))
        return -1;
    memcpy(b->bytes + b->len, data, len);
    b->len += len;
    return 0;
}
