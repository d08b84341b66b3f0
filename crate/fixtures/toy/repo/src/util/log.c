/* Minimal stderr logging. */

#include <stdarg.h>
#include <stdio.h>

static int log_level = 1;

void log_set_level(int level)
{
    log_level = level;
}

void log_printf(int level, const char *fmt, ...)
{
    if (level > log_level)
        return;
    va_list ap;
    va_start(ap, fmt);
    vfprintf(stderr, fmt, ap);
    va_end(ap);
    fputc('\n', stderr);
}
