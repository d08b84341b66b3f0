/* Classic 16-bytes-per-row hexdump. */

#include <ctype.h>
#include <stdio.h>

void hexdump(FILE *out, const void *data, size_t len)
{
    const unsigned char *bytes = data;
    for (size_t row = 0; row < len; row += 16) {
        fprintf(out, "%08zx  ", row);
        for (size_t col = 0; col < 16; col++) {
            if (row + col < len)
                fprintf(out, "%02x ", bytes[row + col]);
            else
                fputs("   ", out);
            if (col == 7)
                fputc(' ', out);
        }
        fputs(" |", out);
        for (size_t col = 0; col < 16 && row + col < len; col++) {
            unsigned char c = bytes[row + col];
            fputc(isprint(c) ? c : '.', out);
        }
        fputs("|\n", out);
    }
}
