/* CRC-32 (IEEE 802.3 polynomial), table-driven. */

#include <stdint.h>
#include <stddef.h>

static uint32_t crc_table[256];
static int crc_table_ready;

static void crc32_init(void)
{
    for (uint32_t n = 0; n < 256; n++) {
        uint32_t c = n;
        for (int k = 0; k < 8; k++)
            c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
        crc_table[n] = c;
    }
    crc_table_ready = 1;
}

uint32_t crc32_update(uint32_t crc, const void *data, size_t len)
{
    if (!crc_table_ready)
        crc32_init();
    const uint8_t *bytes = data;
    crc ^= 0xffffffffu;
    for (size_t i = 0; i < len; i++)
        crc = crc_table[(crc ^ bytes[i]) & 0xff] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

uint32_t crc32(const void *data, size_t len)
{
    return crc32_update(0, data, len);
}
