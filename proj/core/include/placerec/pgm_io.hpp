#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "placerec/depth.hpp"

namespace placerec {

// 16-bit binary PGM (P5, maxval 65535, big-endian samples, values in mm).
void write_pgm16(const std::filesystem::path& path, const DepthFrame& frame);
DepthFrame read_pgm16(const std::filesystem::path& path, const CameraIntrinsics& k);

// A depth sequence is a directory of zero-padded numbered .pgm files.
// Frame index is parsed from the file name stem.
std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir);

std::string frame_file_name(int index);  // "000042.pgm"

}  // namespace placerec
