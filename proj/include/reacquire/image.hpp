#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace reacquire::similarity {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0);

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// 64-bit average-hash fingerprint. Bit 63 is the top-left block, then
/// row-major.
struct ImageHash {
    std::uint64_t bits = 0;

    std::string hex() const;
    /// Parses 1-16 hex digits; throws std::invalid_argument otherwise.
    static ImageHash from_hex(std::string_view hex);
    friend bool operator==(const ImageHash&, const ImageHash&) = default;
};

/**
 * Average hash over an 8x8 grid of blocks.
 *
 * Block (r, c) covers rows floor(r*H/8) .. floor((r+1)*H/8)-1 and the analogous
 * columns. A bit is set iff the block mean is strictly greater than the
 * global mean; the comparison is done on integer sums so ties are exact.
 * Throws std::domain_error for images smaller than 8x8.
 */
ImageHash average_hash(const GrayImage& image);

/// Reads a plain (P2) or binary (P5) portable graymap with maxval <= 255.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(std::string_view bytes);
/// Binary (P5) encoding.
std::string encode_pgm(const GrayImage& image);

}  // namespace reacquire::similarity
