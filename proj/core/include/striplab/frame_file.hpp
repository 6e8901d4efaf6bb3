#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "striplab/frame.hpp"

namespace striplab {

inline constexpr std::string_view kFrameFormat = "strip-frame/1";

// Layout: 4-byte little-endian header length, UTF-8 JSON header, then the
// column-major payload as little-endian binary64 (complex entries as
// interleaved real, imaginary pairs).
struct FrameHeader {
  std::string format;
  Index m = 0;
  Index n = 0;
  ScalarKind kind = ScalarKind::kReal;
  FrameInfo info;
  std::optional<std::string> created;
};

struct SaveOptions {
  bool timestamp = true;
};

std::string encode_frame(const SensingMatrix& phi, const SaveOptions& opts = {});

// Throws BadMagic, TruncatedPayload or DimensionMismatch. If `expected` is
// set, a frame of the other scalar kind is rejected with DimensionMismatch.
// Columns whose norms drifted by more than 1e-8 produce a warning in info().
SensingMatrix decode_frame(std::string_view bytes,
                           std::optional<ScalarKind> expected = std::nullopt);
FrameHeader decode_frame_header(std::string_view bytes);

void save_frame(const SensingMatrix& phi, const std::string& path, const SaveOptions& opts = {});
SensingMatrix load_frame(const std::string& path,
                         std::optional<ScalarKind> expected = std::nullopt);

// Long-format CSV with header "row,col,re,im", one line per entry in
// column-major order; numbers use the shortest round-trip representation.
void write_csv(const SensingMatrix& phi, std::ostream& out);

struct CsvMatrix {
  Eigen::MatrixXcd entries;
  ScalarKind kind = ScalarKind::kReal;  // kReal iff every imaginary part is zero
};

// Reads the format written by write_csv (the "im" column is optional).
// Every (row, col) must appear exactly once. Throws DimensionMismatch or
// InvalidArgument on malformed input.
CsvMatrix read_csv(std::istream& in);

}  // namespace striplab
