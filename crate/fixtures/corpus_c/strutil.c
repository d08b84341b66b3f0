/* String helpers missing from the standard library. */

#include <ctype.h>
#include <stdlib.h>
#include <string.h>

size_t str_lcpy(char *dst, const char *src, size_t cap)
{
    size_t len = strlen(src);
    if (cap) {
        size_t copy = len < cap - 1 ? len : cap - 1;
        memcpy(dst, src, copy);
        dst[copy] = '\0';
    }
    return len;
}

int str_has_prefix(const char *s, const char *prefix)
{
    return strncmp(s, prefix, strlen(prefix)) == 0;
}

int str_has_suffix(const char *s, const char *suffix)
{
    size_t slen = strlen(s);
    size_t xlen = strlen(suffix);
    return xlen <= slen && memcmp(s + slen - xlen, suffix, xlen) == 0;
}

char *str_tolower_dup(const char *s)
{
    size_t len = strlen(s);
    char *out = malloc(len + 1);
    if (!out)
        return NULL;
    for (size_t i = 0; i < len; i++)
        out[i] = (char)tolower((unsigned char)s[i]);
    out[len] = '\0';
    return out;
}

size_t str_split(char *s, char sep, char **parts, size_t max_parts)
{
    size_t n = 0;
    while (n < max_parts) {
        parts[n++] = s;
        char *next = strchr(s, sep);
        if (!next)
            break;
        *next = '\0';
        s = next + 1;
    }
    return n;
}
