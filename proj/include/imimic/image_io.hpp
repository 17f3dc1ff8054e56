#ifndef IMIMIC_IMAGE_IO_HPP
#define IMIMIC_IMAGE_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "imimic/image.hpp"

namespace imimic {

// Binary PGM (P5, maxval <= 255).
Plane read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Plane& plane);

// 8-bit PNG; grayscale read as-is, color collapsed via integer luma.
Plane read_png(const std::string& path);

// Raw Y8 stream: 12-byte little-endian header (width, height, frame_count as
// u32) followed by frame_count planes of width*height bytes.
std::vector<Plane> read_y8_stream(std::istream& in, const std::string& origin);
void write_y8_stream(std::ostream& out, const std::vector<Plane>& planes);

// Loads a frame sequence from either a directory of .pgm/.png files (sorted
// lexicographically by filename) or a raw Y8 stream ("-" = stdin). Throws
// TooFewFrames when fewer than min_frames decode.
std::vector<Frame> read_frame_sequence(const std::string& source, double fps,
                                       size_t min_frames = 0);

}  // namespace imimic

#endif
