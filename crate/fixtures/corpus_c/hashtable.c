/* Open-addressing hash table with linear probing. */

#include <stdlib.h>
#include <string.h>

#define HT_INITIAL_CAP 16
#define HT_MAX_LOAD_NUM 3
#define HT_MAX_LOAD_DEN 4

struct ht_slot {
    char *key;
    void *value;
    int used;
};

struct hashtable {
    struct ht_slot *slots;
    size_t cap;
    size_t len;
};

static size_t ht_hash(const char *key)
{
    size_t h = 1469598103934665603ULL;
    while (*key) {
        h ^= (unsigned char)*key++;
        h *= 1099511628211ULL;
    }
    return h;
}

struct hashtable *ht_new(void)
{
    struct hashtable *ht = calloc(1, sizeof(*ht));
    if (!ht)
        return NULL;
    ht->slots = calloc(HT_INITIAL_CAP, sizeof(*ht->slots));
    if (!ht->slots) {
        free(ht);
        return NULL;
    }
    ht->cap = HT_INITIAL_CAP;
    return ht;
}

static int ht_grow(struct hashtable *ht)
{
    size_t new_cap = ht->cap * 2;
    struct ht_slot *new_slots = calloc(new_cap, sizeof(*new_slots));
    if (!new_slots)
        return -1;
    for (size_t i = 0; i < ht->cap; i++) {
        struct ht_slot *slot = &ht->slots[i];
        if (!slot->used)
            continue;
        size_t j = ht_hash(slot->key) & (new_cap - 1);
        while (new_slots[j].used)
            j = (j + 1) & (new_cap - 1);
        new_slots[j] = *slot;
    }
    free(ht->slots);
    ht->slots = new_slots;
    ht->cap = new_cap;
    return 0;
}

int ht_put(struct hashtable *ht, const char *key, void *value)
{
    if (ht->len * HT_MAX_LOAD_DEN >= ht->cap * HT_MAX_LOAD_NUM && ht_grow(ht))
        return -1;
    size_t i = ht_hash(key) & (ht->cap - 1);
    while (ht->slots[i].used) {
        if (strcmp(ht->slots[i].key, key) == 0) {
            ht->slots[i].value = value;
            return 0;
        }
        i = (i + 1) & (ht->cap - 1);
    }
    ht->slots[i].key = strdup(key);
    if (!ht->slots[i].key)
        return -1;
    ht->slots[i].value = value;
    ht->slots[i].used = 1;
    ht->len++;
    return 0;
}

void *ht_get(const struct hashtable *ht, const char *key)
{
    size_t i = ht_hash(key) & (ht->cap - 1);
    while (ht->slots[i].used) {
        if (strcmp(ht->slots[i].key, key) == 0)
            return ht->slots[i].value;
        i = (i + 1) & (ht->cap - 1);
    }
    return NULL;
}

void ht_free(struct hashtable *ht)
{
    if (!ht)
        return;
    for (size_t i = 0; i < ht->cap; i++)
        if (ht->slots[i].used)
            free(ht->slots[i].key);
    free(ht->slots);
    free(ht);
}
