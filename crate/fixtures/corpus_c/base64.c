/* RFC 4648 base64 encoding and decoding. */

#include <stddef.h>
#include <stdint.h>

static const char enc_table[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

size_t base64_encoded_len(size_t raw)
{
    return (raw + 2) / 3 * 4;
}

size_t base64_encode(const uint8_t *src, size_t len, char *dst)
{
    size_t out = 0;
    size_t i;
    for (i = 0; i + 3 <= len; i += 3) {
        uint32_t triple = (uint32_t)src[i] << 16 | (uint32_t)src[i + 1] << 8 | src[i + 2];
        dst[out++] = enc_table[(triple >> 18) & 63];
        dst[out++] = enc_table[(triple >> 12) & 63];
        dst[out++] = enc_table[(triple >> 6) & 63];
        dst[out++] = enc_table[triple & 63];
    }
    size_t rest = len - i;
    if (rest == 1) {
        uint32_t triple = (uint32_t)src[i] << 16;
        dst[out++] = enc_table[(triple >> 18) & 63];
        dst[out++] = enc_table[(triple >> 12) & 63];
        dst[out++] = '=';
        dst[out++] = '=';
    } else if (rest == 2) {
        uint32_t triple = (uint32_t)src[i] << 16 | (uint32_t)src[i + 1] << 8;
        dst[out++] = enc_table[(triple >> 18) & 63];
        dst[out++] = enc_table[(triple >> 12) & 63];
        dst[out++] = enc_table[(triple >> 6) & 63];
        dst[out++] = '=';
    }
    return out;
}

static int dec_value(char c)
{
    if (c >= 'A' && c <= 'Z')
        return c - 'A';
    if (c >= 'a' && c <= 'z')
        return c - 'a' + 26;
    if (c >= '0' && c <= '9')
        return c - '0' + 52;
    if (c == '+')
        return 62;
    if (c == '/')
        return 63;
    return -1;
}

long base64_decode(const char *src, size_t len, uint8_t *dst)
{
    if (len % 4 != 0)
        return -1;
    size_t out = 0;
    for (size_t i = 0; i < len; i += 4) {
        int pad = 0;
        uint32_t triple = 0;
        for (int k = 0; k < 4; k++) {
            char c = src[i + k];
            if (c == '=' && i + 4 == len && k >= 2) {
                pad++;
                triple <<= 6;
                continue;
            }
            int v = dec_value(c);
            if (v < 0)
                return -1;
            triple = triple << 6 | (uint32_t)v;
        }
        dst[out++] = (uint8_t)(triple >> 16);
        if (pad < 2)
            dst[out++] = (uint8_t)(triple >> 8);
        if (pad < 1)
            dst[out++] = (uint8_t)triple;
    }
    return (long)out;
}
