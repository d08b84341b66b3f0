/* Tiny INI-style configuration reader.
 *
 * Supports [sections], key = value pairs, and ';' or '#' comments. Values
 * keep internal whitespace but are trimmed at both ends.
 */

#include <ctype.h>
#include <stdio.h>
#include <string.h>

typedef int (*ini_callback)(const char *section, const char *key,
                            const char *value, void *userdata);

static char *trim(char *s)
{
    while (isspace((unsigned char)*s))
        s++;
    char *end = s + strlen(s);
    while (end > s && isspace((unsigned char)end[-1]))
        *--end = '\0';
    return s;
}

static void strip_comment(char *s)
{
    for (; *s; s++) {
        if (*s == ';' || *s == '#') {
            *s = '\0';
            return;
        }
    }
}

int ini_parse_file(FILE *fp, ini_callback cb, void *userdata)
{
    char line[512];
    char section[128] = "";
    int lineno = 0;

    while (fgets(line, sizeof(line), fp)) {
        lineno++;
        strip_comment(line);
        char *s = trim(line);
        if (*s == '\0')
            continue;

        if (*s == '[') {
            char *end = strchr(s, ']');
            if (!end)
                return -lineno;
            *end = '\0';
            strncpy(section, trim(s + 1), sizeof(section) - 1);
            section[sizeof(section) - 1] = '\0';
            continue;
        }

        char *eq = strchr(s, '=');
        if (!eq)
            return -lineno;
        *eq = '\0';
        char *key = trim(s);
        char *value = trim(eq + 1);
        if (*key == '\0')
            return -lineno;
        if (cb(section, key, value, userdata))
            return -lineno;
    }
    return 0;
}
