/* Exponential backoff with decorrelated jitter. */

#include <stdint.h>

struct retry_policy {
    uint32_t base_ms;
    uint32_t cap_ms;
    uint32_t max_attempts;
};

struct retry_state {
    uint32_t attempt;
    uint32_t last_delay_ms;
    uint64_t rng;
};

static uint32_t xorshift32(uint64_t *state)
{
    uint64_t x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    return (uint32_t)x;
}

void retry_reset(struct retry_state *st, uint64_t seed)
{
    st->attempt = 0;
    st->last_delay_ms = 0;
    st->rng = seed ? seed : 0x9e3779b97f4a7c15ULL;
}

/* Returns the next delay in milliseconds, or UINT32_MAX when exhausted. */
uint32_t retry_next_delay(struct retry_state *st, const struct retry_policy *p)
{
    if (st->attempt >= p->max_attempts)
        return UINT32_MAX;
    st->attempt++;
    uint32_t low = p->base_ms;
    uint32_t high = st->last_delay_ms * 3;
    if (high < low)
        high = low;
    if (high > p->cap_ms)
        high = p->cap_ms;
    uint32_t span = high - low + 1;
    uint32_t delay = low + xorshift32(&st->rng) % span;
    st->last_delay_ms = delay;
    return delay;
}
