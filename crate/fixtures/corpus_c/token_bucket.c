/* Token-bucket rate limiter with monotonic-clock refill. */

#include <stdint.h>

struct token_bucket {
    double tokens;
    double capacity;
    double refill_per_sec;
    uint64_t last_refill_ns;
};

void bucket_init(struct token_bucket *tb, double capacity,
                 double refill_per_sec, uint64_t now_ns)
{
    tb->tokens = capacity;
    tb->capacity = capacity;
    tb->refill_per_sec = refill_per_sec;
    tb->last_refill_ns = now_ns;
}

static void bucket_refill(struct token_bucket *tb, uint64_t now_ns)
{
    if (now_ns <= tb->last_refill_ns)
        return;
    double elapsed = (double)(now_ns - tb->last_refill_ns) / 1e9;
    tb->tokens += elapsed * tb->refill_per_sec;
    if (tb->tokens > tb->capacity)
        tb->tokens = tb->capacity;
    tb->last_refill_ns = now_ns;
}

int bucket_try_take(struct token_bucket *tb, double cost, uint64_t now_ns)
{
    bucket_refill(tb, now_ns);
    if (tb->tokens < cost)
        return 0;
    tb->tokens -= cost;
    return 1;
}

/* Nanoseconds until `cost` tokens become available, 0 when ready now. */
uint64_t bucket_wait_ns(const struct token_bucket *tb, double cost)
{
    if (tb->tokens >= cost)
        return 0;
    double missing = cost - tb->tokens;
    return (uint64_t)(missing / tb->refill_per_sec * 1e9) + 1;
}
