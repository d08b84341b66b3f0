/* Fixed-capacity single-producer single-consumer ring buffer. */

#include <stdint.h>
#include <string.h>

struct ringbuf {
    uint8_t *data;
    size_t cap;      /* power of two */
    size_t head;     /* write index */
    size_t tail;     /* read index */
};

size_t ringbuf_avail(const struct ringbuf *rb)
{
    return rb->head - rb->tail;
}

size_t ringbuf_space(const struct ringbuf *rb)
{
    return rb->cap - ringbuf_avail(rb);
}

size_t ringbuf_write(struct ringbuf *rb, const uint8_t *src, size_t len)
{
    size_t space = ringbuf_space(rb);
    if (len > space)
        len = space;
    size_t mask = rb->cap - 1;
    for (size_t i = 0; i < len; i++)
        rb->data[(rb->head + i) & mask] = src[i];
    rb->head += len;
    return len;
}

size_t ringbuf_read(struct ringbuf *rb, uint8_t *dst, size_t len)
{
    size_t avail = ringbuf_avail(rb);
    if (len > avail)
        len = avail;
    size_t mask = rb->cap - 1;
    for (size_t i = 0; i < len; i++)
        dst[i] = rb->data[(rb->tail + i) & mask];
    rb->tail += len;
    return len;
}

size_t ringbuf_peek(const struct ringbuf *rb, uint8_t *dst, size_t len)
{
    size_t avail = ringbuf_avail(rb);
    if (len > avail)
        len = avail;
    size_t mask = rb->cap - 1;
    for (size_t i = 0; i < len; i++)
        dst[i] = rb->data[(rb->tail + i) & mask];
    return len;
}

void ringbuf_clear(struct ringbuf *rb)
{
    rb->head = 0;
    rb->tail = 0;
}
