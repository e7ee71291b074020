#include "reacquire/image.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace reacquire::similarity {

GrayImage::GrayImage(std::size_t w, std::size_t h, std::uint8_t fill)
    : width(w), height(h), pixels(w * h, fill) {}

std::string ImageHash::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 0; k < 16; ++k) {
        out[static_cast<std::size_t>(15 - k)] = digits[(bits >> (4 * k)) & 0xF];
    }
    return out;
}

ImageHash ImageHash::from_hex(std::string_view hex) {
    if (hex.empty() || hex.size() > 16) {
        throw std::invalid_argument("image hash must have 1-16 hex digits");
    }
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
    if (ec != std::errc{} || ptr != hex.data() + hex.size()) {
        throw std::invalid_argument("bad image hash '" + std::string(hex) + "'");
    }
    return ImageHash{value};
}

ImageHash average_hash(const GrayImage& image) {
    if (image.width < 8 || image.height < 8) {
        throw std::domain_error("average_hash needs an image of at least 8x8 pixels");
    }
    if (image.pixels.size() != image.width * image.height) {
        throw std::invalid_argument("image pixel buffer does not match its dimensions");
    }
    const auto w = image.width;
    const auto h = image.height;

    std::uint64_t total = 0;
    for (auto p : image.pixels) {
        total += p;
    }
    const auto area = static_cast<std::uint64_t>(w) * h;

    std::uint64_t bits = 0;
    for (std::size_t r = 0; r < 8; ++r) {
        const auto r0 = r * h / 8;
        const auto r1 = (r + 1) * h / 8;
        for (std::size_t c = 0; c < 8; ++c) {
            const auto c0 = c * w / 8;
            const auto c1 = (c + 1) * w / 8;
            std::uint64_t sum = 0;
            for (auto y = r0; y < r1; ++y) {
                for (auto x = c0; x < c1; ++x) {
                    sum += image.at(y, x);
                }
            }
            const auto block_area = static_cast<std::uint64_t>(r1 - r0) * (c1 - c0);
            // sum/block_area > total/area, cross-multiplied.
            bits <<= 1;
            if (static_cast<unsigned __int128>(sum) * area >
                static_cast<unsigned __int128>(total) * block_area) {
                bits |= 1;
            }
        }
    }
    return ImageHash{bits};
}

namespace {

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : s_(bytes) {}

    std::size_t next_number() {
        skip_space_and_comments();
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
        if (ec != std::errc{}) {
            throw std::invalid_argument("malformed PGM: expected a number");
        }
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        return value;
    }

    std::string_view magic() {
        if (s_.size() < 2) {
            throw std::invalid_argument("malformed PGM: truncated header");
        }
        pos_ = 2;
        return s_.substr(0, 2);
    }

    std::string_view raster_after_single_space() {
        if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            throw std::invalid_argument("malformed PGM: missing separator before raster");
        }
        return s_.substr(pos_ + 1);
    }

private:
    void skip_space_and_comments() {
        while (pos_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else if (s_[pos_] == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
    PgmReader in(bytes);
    const auto magic = in.magic();
    if (magic != "P2" && magic != "P5") {
        throw std::invalid_argument("not a portable graymap (expected P2 or P5)");
    }
    const auto w = in.next_number();
    const auto h = in.next_number();
    const auto maxval = in.next_number();
    if (w == 0 || h == 0) {
        throw std::invalid_argument("malformed PGM: zero dimension");
    }
    if (maxval == 0 || maxval > 255) {
        throw std::invalid_argument("unsupported PGM maxval (8-bit only)");
    }
    GrayImage img(w, h);
    if (magic == "P2") {
        for (auto& p : img.pixels) {
            const auto v = in.next_number();
            if (v > maxval) {
                throw std::invalid_argument("malformed PGM: sample exceeds maxval");
            }
            p = static_cast<std::uint8_t>(v);
        }
    } else {
        const auto raster = in.raster_after_single_space();
        if (raster.size() < img.pixels.size()) {
            throw std::invalid_argument("malformed PGM: truncated raster");
        }
        for (std::size_t k = 0; k < img.pixels.size(); ++k) {
            img.pixels[k] = static_cast<std::uint8_t>(raster[k]);
        }
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open image '" + path.string() + "'");
    }
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_pgm(bytes);
}

std::string encode_pgm(const GrayImage& image) {
    std::ostringstream out;
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    return out.str();
}

}  // namespace reacquire::similarity
