#pragma once

#include <png.h>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "flameseg/core.hpp"

namespace flameseg {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Fixed gray ramp palette: entry i -> round(255*i/(C-1)). The palette is
// cosmetic; only the indices carry meaning.
inline void fill_palette(std::vector<png_color>& pal, int num_classes) {
    pal.resize(static_cast<std::size_t>(num_classes));
    for (int i = 0; i < num_classes; ++i) {
        int g = num_classes > 1 ? (i * 255 + (num_classes - 1) / 2) / (num_classes - 1) : 0;
        pal[i].red = pal[i].green = pal[i].blue = static_cast<png_byte>(g);
    }
}

}  // namespace detail

/// Writes an 8-bit indexed-color PNG whose palette indices are class ids.
inline void save_label_mask(const LabelMask& mask, const std::string& path) {
    mask.validate();
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw error("save_label_mask: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw error("save_label_mask: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw error("save_label_mask: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw error("save_label_mask: libpng error writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, mask.width, mask.height, 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_color> palette;
    detail::fill_palette(palette, mask.num_classes);
    png_set_PLTE(png, info, palette.data(), mask.num_classes);
    png_write_info(png, info);

    std::vector<png_bytep> rows(static_cast<std::size_t>(mask.height));
    for (int y = 0; y < mask.height; ++y)
        rows[y] = const_cast<png_bytep>(&mask.labels[static_cast<std::size_t>(y) * mask.width]);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Reads an indexed-color PNG; pixel indices become class ids and
/// num_classes = 1 + the largest index present in the pixel data.
inline LabelMask load_label_mask(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw error("load_label_mask: cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw error("load_label_mask: not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw error("load_label_mask: png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw error("load_label_mask: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw error("load_label_mask: libpng error reading " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    if (color_type != PNG_COLOR_TYPE_PALETTE) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw error("load_label_mask: not an indexed-color (palette) PNG: " + path);
    }
    if (png_get_bit_depth(png, info) < 8)
        png_set_packing(png);  // expand 1/2/4-bit indices to one byte each
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[y] = &pixels[static_cast<std::size_t>(y) * width];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    int max_index = 0;
    for (std::uint8_t v : pixels)
        if (v > max_index) max_index = v;

    LabelMask mask;
    mask.width = width;
    mask.height = height;
    mask.num_classes = std::max(2, max_index + 1);
    mask.labels = std::move(pixels);
    mask.validate();
    return mask;
}

}  // namespace flameseg
