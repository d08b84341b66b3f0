/* Incremental line-oriented command parser.
 *
 * Accepts CRLF or bare LF line endings and splits each line into
 * whitespace-separated tokens in place.
 */

#include <ctype.h>
#include <string.h>

#define MAX_TOKENS 16

enum parse_result {
    PARSE_OK,
    PARSE_NEED_MORE,
    PARSE_TOO_LONG,
    PARSE_TOO_MANY_TOKENS,
};

struct parsed_line {
    char *tokens[MAX_TOKENS];
    int ntokens;
};

static char *find_line_end(char *buf, size_t len)
{
    for (size_t i = 0; i < len; i++)
        if (buf[i] == '\n')
            return buf + i;
    return NULL;
}

enum parse_result parse_line(char *buf, size_t len, size_t max_line,
                             struct parsed_line *out, size_t *consumed)
{
    char *end = find_line_end(buf, len);
    if (!end) {
        if (len >= max_line)
            return PARSE_TOO_LONG;
        return PARSE_NEED_MORE;
    }
    *consumed = (size_t)(end - buf) + 1;
    if (end > buf && end[-1] == '\r')
        end--;
    *end = '\0';

    out->ntokens = 0;
    char *cursor = buf;
    while (*cursor) {
        while (*cursor && isspace((unsigned char)*cursor))
            cursor++;
        if (!*cursor)
            break;
        if (out->ntokens == MAX_TOKENS)
            return PARSE_TOO_MANY_TOKENS;
        out->tokens[out->ntokens++] = cursor;
        while (*cursor && !isspace((unsigned char)*cursor))
            cursor++;
        if (*cursor)
            *cursor++ = '\0';
    }
    return PARSE_OK;
}

int token_equals(const struct parsed_line *line, int index, const char *word)
{
    if (index >= line->ntokens)
        return 0;
    const char *token = line->tokens[index];
    while (*token && *word) {
        if (tolower((unsigned char)*token) != tolower((unsigned char)*word))
            return 0;
        token++;
        word++;
    }
    return *token == '\0' && *word == '\0';
}
