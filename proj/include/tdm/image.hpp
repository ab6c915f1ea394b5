#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "tdm/field.hpp"

namespace tdm {

struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, width * height
    double timestamp = 0.0;
    std::int64_t index = 0;

    GrayFrame() = default;
    GrayFrame(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

namespace detail {

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
inline std::string pnm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace detail

/// Binary PGM (P5, maxval 255) reader.
inline GrayFrame read_pgm(std::istream& is) {
    if (detail::pnm_token(is) != "P5") throw InputError("PGM: expected P5 magic");
    const std::string ws = detail::pnm_token(is);
    const std::string hs = detail::pnm_token(is);
    const std::string ms = detail::pnm_token(is);
    if (ws.empty() || hs.empty() || ms.empty()) throw InputError("PGM: truncated header");
    const int w = std::stoi(ws), h = std::stoi(hs), maxval = std::stoi(ms);
    if (w <= 0 || h <= 0) throw InputError("PGM: bad dimensions");
    if (maxval != 255) throw InputError("PGM: only maxval 255 supported");
    GrayFrame f(w, h);
    is.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (is.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw InputError("PGM: truncated pixel data");
    return f;
}

inline GrayFrame read_pgm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open: " + path);
    return read_pgm(is);
}

inline void write_pgm(const GrayFrame& f, std::ostream& os) {
    os << "P5\n" << f.width << ' ' << f.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(f.pixels.data()),
             static_cast<std::streamsize>(f.pixels.size()));
}

inline void write_pgm(const GrayFrame& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open for writing: " + path);
    write_pgm(f, os);
}

}  // namespace tdm
