/* Dense bitset over heap-allocated words. */

#include <stdint.h>
#include <stdlib.h>

#define WORD_BITS 64

struct bitset {
    uint64_t *words;
    size_t nbits;
};

struct bitset *bitset_new(size_t nbits)
{
    struct bitset *bs = malloc(sizeof(*bs));
    if (!bs)
        return NULL;
    size_t words = (nbits + WORD_BITS - 1) / WORD_BITS;
    bs->words = calloc(words ? words : 1, sizeof(uint64_t));
    if (!bs->words) {
        free(bs);
        return NULL;
    }
    bs->nbits = nbits;
    return bs;
}

void bitset_set(struct bitset *bs, size_t bit)
{
    if (bit < bs->nbits)
        bs->words[bit / WORD_BITS] |= 1ULL << (bit % WORD_BITS);
}

void bitset_clear(struct bitset *bs, size_t bit)
{
    if (bit < bs->nbits)
        bs->words[bit / WORD_BITS] &= ~(1ULL << (bit % WORD_BITS));
}

int bitset_test(const struct bitset *bs, size_t bit)
{
    if (bit >= bs->nbits)
        return 0;
    return (bs->words[bit / WORD_BITS] >> (bit % WORD_BITS)) & 1;
}

size_t bitset_count(const struct bitset *bs)
{
    size_t words = (bs->nbits + WORD_BITS - 1) / WORD_BITS;
    size_t total = 0;
    for (size_t i = 0; i < words; i++) {
        uint64_t w = bs->words[i];
        while (w) {
            w &= w - 1;
            total++;
        }
    }
    return total;
}

void bitset_free(struct bitset *bs)
{
    if (bs) {
        free(bs->words);
        free(bs);
    }
}
