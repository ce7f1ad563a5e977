#pragma once

// "dten v1" text format:
//
//   dten 1
//   I1 I2 ... Id
//   <prod(I_k) whitespace-separated decimal floats, row-major>
//
// The reader accepts scientific notation and any whitespace layout. The
// writer emits 17 significant digits so values survive a round trip.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ltr/tensor.hpp"

namespace ltr {

DenseTensor read_dten(std::istream& in);
DenseTensor read_dten_file(const std::filesystem::path& path);

void write_dten(std::ostream& out, const DenseTensor& t);
void write_dten_file(const std::filesystem::path& path, const DenseTensor& t);

/// %.17g formatting.
std::string format_double(double v);

/// Parses one decimal float; the whole token must be consumed.
double parse_double(std::string_view token);

}  // namespace ltr
