#include "imimic/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace imimic {

namespace fs = std::filesystem;

namespace {

// Skips whitespace and '#' comment lines between PGM header tokens.
bool next_pnm_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) return false;
    do {
        tok.push_back(char(c));
    } while ((c = in.get()) != EOF && !std::isspace(c));
    return true;
}

long parse_dim(const std::string& tok, const std::string& path, const char* what) {
    try {
        size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::DecodeFailure, path + ": bad " + what + " '" + tok + "'");
    }
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;

    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) return 0;
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void write_u32le(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

Plane read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::DecodeFailure, path + ": cannot open");
    std::string tok;
    if (!next_pnm_token(in, tok) || tok != "P5")
        throw Error(ErrorCode::DecodeFailure, path + ": not a binary PGM (P5)");
    if (!next_pnm_token(in, tok)) throw Error(ErrorCode::DecodeFailure, path + ": truncated header");
    long w = parse_dim(tok, path, "width");
    if (!next_pnm_token(in, tok)) throw Error(ErrorCode::DecodeFailure, path + ": truncated header");
    long h = parse_dim(tok, path, "height");
    if (!next_pnm_token(in, tok)) throw Error(ErrorCode::DecodeFailure, path + ": truncated header");
    long maxval = parse_dim(tok, path, "maxval");
    if (maxval > 255)
        throw Error(ErrorCode::DecodeFailure, path + ": 16-bit PGM not supported");

    Plane p{int(w), int(h)};
    in.read(reinterpret_cast<char*>(p.data()), std::streamsize(p.size()));
    if (size_t(in.gcount()) != p.size())
        throw Error(ErrorCode::DecodeFailure, path + ": truncated pixel data");
    return p;
}

void write_pgm(const std::string& path, const Plane& plane) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::DecodeFailure, path + ": cannot open for writing");
    out << "P5\n" << plane.width() << " " << plane.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(plane.data()), std::streamsize(plane.size()));
    if (!out) throw Error(ErrorCode::DecodeFailure, path + ": write failed");
}

Plane read_png(const std::string& path) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    if (!r.fp) throw Error(ErrorCode::DecodeFailure, path + ": cannot open");

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, r.fp) != 8 || png_sig_cmp(sig, 0, 8))
        throw Error(ErrorCode::DecodeFailure, path + ": not a PNG");

    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw Error(ErrorCode::DecodeFailure, path + ": libpng init failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw Error(ErrorCode::DecodeFailure, path + ": libpng init failed");
    if (setjmp(png_jmpbuf(r.png)))
        throw Error(ErrorCode::DecodeFailure, path + ": corrupt PNG");

    png_init_io(r.png, r.fp);
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    png_uint_32 w, h;
    int bit_depth, color_type;
    png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (bit_depth != 8)
        throw Error(ErrorCode::DecodeFailure,
                    path + ": only 8-bit PNG supported, got " + std::to_string(bit_depth));

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    png_set_strip_alpha(r.png);
    png_read_update_info(r.png, r.info);

    int channels = png_get_channels(r.png, r.info);
    if (channels != 1 && channels != 3)
        throw Error(ErrorCode::DecodeFailure, path + ": unsupported channel layout");

    std::vector<uint8_t> row(size_t(w) * channels);
    Plane out{int(w), int(h)};
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(r.png, row.data(), nullptr);
        uint8_t* dst = out.data() + size_t(y) * w;
        if (channels == 1) {
            std::memcpy(dst, row.data(), w);
        } else {
            for (png_uint_32 x = 0; x < w; ++x)
                dst[x] = luma(row[x * 3], row[x * 3 + 1], row[x * 3 + 2]);
        }
    }
    return out;
}

std::vector<Plane> read_y8_stream(std::istream& in, const std::string& origin) {
    uint32_t w = read_u32le(in);
    uint32_t h = read_u32le(in);
    uint32_t n = read_u32le(in);
    if (!in) throw Error(ErrorCode::DecodeFailure, origin + ": truncated Y8 header");
    if (w < 8 || h < 8 || w > 1u << 16 || h > 1u << 16)
        throw Error(ErrorCode::DecodeFailure,
                    origin + ": implausible Y8 dimensions " + std::to_string(w) + "x" +
                        std::to_string(h));
    std::vector<Plane> planes;
    planes.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        Plane p{int(w), int(h)};
        in.read(reinterpret_cast<char*>(p.data()), std::streamsize(p.size()));
        if (size_t(in.gcount()) != p.size())
            throw Error(ErrorCode::DecodeFailure,
                        origin + ": truncated Y8 frame " + std::to_string(i));
        planes.push_back(std::move(p));
    }
    return planes;
}

void write_y8_stream(std::ostream& out, const std::vector<Plane>& planes) {
    uint32_t w = planes.empty() ? 8 : uint32_t(planes[0].width());
    uint32_t h = planes.empty() ? 8 : uint32_t(planes[0].height());
    write_u32le(out, w);
    write_u32le(out, h);
    write_u32le(out, uint32_t(planes.size()));
    for (const auto& p : planes)
        out.write(reinterpret_cast<const char*>(p.data()), std::streamsize(p.size()));
}

std::vector<Frame> read_frame_sequence(const std::string& source, double fps,
                                       size_t min_frames) {
    std::vector<Plane> planes;
    std::vector<std::string> names;

    if (source == "-") {
        planes = read_y8_stream(std::cin, "<stdin>");
    } else if (fs::is_directory(source)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(source)) {
            if (!entry.is_regular_file()) continue;
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return char(std::tolower(c)); });
            if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) {
                      return a.filename().string() < b.filename().string();
                  });
        for (const auto& f : files) {
            std::string ext = f.extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return char(std::tolower(c)); });
            planes.push_back(ext == ".pgm" ? read_pgm(f.string()) : read_png(f.string()));
            names.push_back(f.filename().string());
        }
    } else if (fs::exists(source)) {
        std::ifstream in(source, std::ios::binary);
        if (!in) throw Error(ErrorCode::DecodeFailure, source + ": cannot open");
        planes = read_y8_stream(in, source);
    } else {
        throw Error(ErrorCode::DecodeFailure, source + ": no such file or directory");
    }

    std::vector<Frame> frames;
    frames.reserve(planes.size());
    for (size_t i = 0; i < planes.size(); ++i) {
        if (i > 0 && !planes[i].same_shape(planes[0])) {
            std::string where = i < names.size() ? names[i] : ("frame " + std::to_string(i));
            throw Error(ErrorCode::MixedDimensions,
                        where + " is " + std::to_string(planes[i].width()) + "x" +
                            std::to_string(planes[i].height()) + ", expected " +
                            std::to_string(planes[0].width()) + "x" +
                            std::to_string(planes[0].height()));
        }
        frames.push_back(make_frame(std::move(planes[i]), long(i), fps));
    }
    if (frames.size() < min_frames)
        throw Error(ErrorCode::TooFewFrames,
                    source + ": need at least " + std::to_string(min_frames) + " frames, got " +
                        std::to_string(frames.size()));
    return frames;
}

}  // namespace imimic
