/* Binary min-heap keyed by 64-bit deadline. */

#include <stdlib.h>

struct heap_item {
    unsigned long long deadline;
    void *payload;
};

struct minheap {
    struct heap_item *items;
    size_t len;
    size_t cap;
};

static void swap_items(struct heap_item *a, struct heap_item *b)
{
    struct heap_item tmp = *a;
    *a = *b;
    *b = tmp;
}

static void sift_up(struct minheap *h, size_t i)
{
    while (i > 0) {
        size_t parent = (i - 1) / 2;
        if (h->items[parent].deadline <= h->items[i].deadline)
            break;
        swap_items(&h->items[parent], &h->items[i]);
        i = parent;
    }
}

static void sift_down(struct minheap *h, size_t i)
{
    for (;;) {
        size_t left = 2 * i + 1;
        size_t right = left + 1;
        size_t smallest = i;
        if (left < h->len && h->items[left].deadline < h->items[smallest].deadline)
            smallest = left;
        if (right < h->len && h->items[right].deadline < h->items[smallest].deadline)
            smallest = right;
        if (smallest == i)
            return;
        swap_items(&h->items[i], &h->items[smallest]);
        i = smallest;
    }
}

int heap_push(struct minheap *h, unsigned long long deadline, void *payload)
{
    if (h->len == h->cap) {
        size_t cap = h->cap ? h->cap * 2 : 8;
        struct heap_item *items = realloc(h->items, cap * sizeof(*items));
        if (!items)
            return -1;
        h->items = items;
        h->cap = cap;
    }
    h->items[h->len].deadline = deadline;
    h->items[h->len].payload = payload;
    sift_up(h, h->len++);
    return 0;
}

void *heap_pop(struct minheap *h, unsigned long long *deadline)
{
    if (h->len == 0)
        return NULL;
    void *payload = h->items[0].payload;
    if (deadline)
        *deadline = h->items[0].deadline;
    h->items[0] = h->items[--h->len];
    sift_down(h, 0);
    return payload;
}
