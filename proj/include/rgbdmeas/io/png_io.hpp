#pragma once

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/image.hpp"

namespace rgbdmeas {
namespace detail {

// libpng reports errors by longjmp-ing back to the setjmp point. Every C++
// object with a destructor is declared before setjmp so the jump never skips
// a scope entry; the guard then throws and unwinding cleans up normally.
inline void png_warn_noop(png_structp, png_const_charp) {}

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

inline void open_png_reader(PngReadGuard& g, const std::string& path) {
    g.fp = std::fopen(path.c_str(), "rb");
    if (!g.fp) throw DatasetError("cannot open PNG for reading: " + path);
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn_noop);
    if (!g.png) throw DatasetError("libpng read struct allocation failed: " + path);
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw DatasetError("libpng info struct allocation failed: " + path);
}

inline void open_png_writer(PngWriteGuard& g, const std::string& path) {
    g.fp = std::fopen(path.c_str(), "wb");
    if (!g.fp) throw DatasetError("cannot open PNG for writing: " + path);
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn_noop);
    if (!g.png) throw DatasetError("libpng write struct allocation failed: " + path);
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw DatasetError("libpng info struct allocation failed: " + path);
}

}  // namespace detail

// 16-bit single-channel PNG, one unit per depth_scale millimetres.
inline DepthImage read_depth_png(const std::string& path) {
    detail::PngReadGuard g;
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    DepthImage out;
    detail::open_png_reader(g, path);
    if (setjmp(png_jmpbuf(g.png))) throw DatasetError("corrupt or unreadable PNG: " + path);
    png_init_io(g.png, g.fp);
    png_read_info(g.png, g.info);
    const png_uint_32 w = png_get_image_width(g.png, g.info);
    const png_uint_32 h = png_get_image_height(g.png, g.info);
    if (png_get_color_type(g.png, g.info) != PNG_COLOR_TYPE_GRAY ||
        png_get_bit_depth(g.png, g.info) != 16)
        throw DatasetError("depth PNG must be 16-bit single-channel: " + path);
    out = DepthImage(static_cast<int>(w), static_cast<int>(h));
    bytes.resize(static_cast<std::size_t>(w) * h * 2);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * 2;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i)
        out.data()[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    return out;
}

inline void write_depth_png(const std::string& path, const DepthImage& image) {
    detail::PngWriteGuard g;
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(image.width()) * image.height() * 2);
    std::vector<png_bytep> rows(image.height());
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        bytes[2 * i] = static_cast<std::uint8_t>(image.data()[i] >> 8);
        bytes[2 * i + 1] = static_cast<std::uint8_t>(image.data()[i] & 0xff);
    }
    for (int y = 0; y < image.height(); ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width() * 2;
    detail::open_png_writer(g, path);
    if (setjmp(png_jmpbuf(g.png))) throw DatasetError("failed to write PNG: " + path);
    png_init_io(g.png, g.fp);
    png_set_IHDR(g.png, g.info, image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

// 8-bit RGB PNG. Palette, grayscale, alpha, and 16-bit inputs are folded to
// RGB8 on read.
inline ColorImage read_color_png(const std::string& path) {
    detail::PngReadGuard g;
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    ColorImage out;
    detail::open_png_reader(g, path);
    if (setjmp(png_jmpbuf(g.png))) throw DatasetError("corrupt or unreadable PNG: " + path);
    png_init_io(g.png, g.fp);
    png_read_info(g.png, g.info);
    const png_uint_32 w = png_get_image_width(g.png, g.info);
    const png_uint_32 h = png_get_image_height(g.png, g.info);
    const png_byte color_type = png_get_color_type(g.png, g.info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(g.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        if (png_get_bit_depth(g.png, g.info) < 8) png_set_expand_gray_1_2_4_to_8(g.png);
        png_set_gray_to_rgb(g.png);
    }
    if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);
    if (png_get_bit_depth(g.png, g.info) == 16) png_set_strip_16(g.png);
    png_set_strip_alpha(g.png);
    png_read_update_info(g.png, g.info);
    if (png_get_channels(g.png, g.info) != 3)
        throw DatasetError("color PNG did not reduce to RGB: " + path);
    out = ColorImage(static_cast<int>(w), static_cast<int>(h));
    bytes.resize(static_cast<std::size_t>(w) * h * 3);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i)
        out.data()[i] = {bytes[3 * i], bytes[3 * i + 1], bytes[3 * i + 2]};
    return out;
}

inline void write_color_png(const std::string& path, const ColorImage& image) {
    detail::PngWriteGuard g;
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(image.width()) * image.height() * 3);
    std::vector<png_bytep> rows(image.height());
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        bytes[3 * i] = image.data()[i][0];
        bytes[3 * i + 1] = image.data()[i][1];
        bytes[3 * i + 2] = image.data()[i][2];
    }
    for (int y = 0; y < image.height(); ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width() * 3;
    detail::open_png_writer(g, path);
    if (setjmp(png_jmpbuf(g.png))) throw DatasetError("failed to write PNG: " + path);
    png_init_io(g.png, g.fp);
    png_set_IHDR(g.png, g.info, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

// 8-bit single-channel mask: 0 = background, any nonzero pixel = label 1.
inline LabelMask read_mask_png(const std::string& path) {
    detail::PngReadGuard g;
    std::vector<std::uint8_t> bytes;
    std::vector<png_bytep> rows;
    LabelMask out;
    detail::open_png_reader(g, path);
    if (setjmp(png_jmpbuf(g.png))) throw DatasetError("corrupt or unreadable PNG: " + path);
    png_init_io(g.png, g.fp);
    png_read_info(g.png, g.info);
    const png_uint_32 w = png_get_image_width(g.png, g.info);
    const png_uint_32 h = png_get_image_height(g.png, g.info);
    if (png_get_color_type(g.png, g.info) != PNG_COLOR_TYPE_GRAY)
        throw DatasetError("mask PNG must be single-channel: " + path);
    if (png_get_bit_depth(g.png, g.info) < 8) png_set_expand_gray_1_2_4_to_8(g.png);
    if (png_get_bit_depth(g.png, g.info) == 16) png_set_strip_16(g.png);
    png_read_update_info(g.png, g.info);
    out = LabelMask(static_cast<int>(w), static_cast<int>(h));
    bytes.resize(static_cast<std::size_t>(w) * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * w;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);
    for (std::size_t i = 0; i < bytes.size(); ++i) out.data()[i] = bytes[i] ? 1 : 0;
    return out;
}

inline void write_mask_png(const std::string& path, const LabelMask& mask) {
    detail::PngWriteGuard g;
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(mask.width()) * mask.height());
    std::vector<png_bytep> rows(mask.height());
    for (std::size_t i = 0; i < mask.data().size(); ++i) bytes[i] = mask.data()[i] ? 255 : 0;
    for (int y = 0; y < mask.height(); ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * mask.width();
    detail::open_png_writer(g, path);
    if (setjmp(png_jmpbuf(g.png))) throw DatasetError("failed to write PNG: " + path);
    png_init_io(g.png, g.fp);
    png_set_IHDR(g.png, g.info, mask.width(), mask.height(), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

}  // namespace rgbdmeas
