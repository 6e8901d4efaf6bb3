#include "striplab/frame_file.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "striplab/errors.hpp"
#include "striplab/report.hpp"

namespace striplab {

namespace {

using Json = nlohmann::ordered_json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

std::uint32_t get_u32(std::string_view in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

void put_f64(std::string& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffU));
}

double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t payload_size(Index m, Index n, ScalarKind kind) {
  return static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n) *
         (kind == ScalarKind::kReal ? 8U : 16U);
}

struct Parsed {
  FrameHeader header;
  std::string_view payload;
};

Parsed parse(std::string_view bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::kBadMagic, "file too short for a frame header");
  const std::uint32_t len = get_u32(bytes);
  if (bytes.size() - 4 < len) {
    throw Error(ErrorCode::kTruncatedPayload, "header length exceeds file size");
  }
  Json j;
  try {
    j = Json::parse(bytes.substr(4, len));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBadMagic, std::string("header is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != std::string(kFrameFormat)) {
    throw Error(ErrorCode::kBadMagic,
                "missing format tag '" + std::string(kFrameFormat) + "'");
  }
  Parsed p;
  FrameHeader& h = p.header;
  try {
    h.format = j.at("format").get<std::string>();
    h.m = j.at("m").get<Index>();
    h.n = j.at("N").get<Index>();
    const auto scalar = j.at("scalar").get<std::string>();
    if (scalar == "real") {
      h.kind = ScalarKind::kReal;
    } else if (scalar == "complex") {
      h.kind = ScalarKind::kComplex;
    } else {
      throw Error(ErrorCode::kBadMagic, "unknown scalar kind '" + scalar + "'");
    }
    h.info.family = j.value("family", std::string("custom"));
    if (j.contains("params")) {
      for (const auto& [key, value] : j["params"].items()) {
        h.info.params[key] = value.get<double>();
      }
    }
    if (j.contains("seed") && !j["seed"].is_null()) h.info.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("warnings")) h.info.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("created")) h.created = j["created"].get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBadMagic, std::string("malformed header: ") + e.what());
  }
  if (h.m < 1 || h.n < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "header dimensions must be positive");
  }
  p.payload = bytes.substr(4 + len);
  return p;
}

}  // namespace

std::string encode_frame(const SensingMatrix& phi, const SaveOptions& opts) {
  const FrameInfo& info = phi.info();
  Json j;
  j["format"] = std::string(kFrameFormat);
  j["m"] = phi.rows();
  j["N"] = phi.cols();
  j["scalar"] = to_string(phi.kind());
  j["family"] = info.family;
  Json params = Json::object();
  for (const auto& [key, value] : info.params) params[key] = value;
  j["params"] = params;
  j["seed"] = info.seed ? Json(*info.seed) : Json(nullptr);
  j["warnings"] = info.warnings;
  if (opts.timestamp) j["created"] = utc_timestamp();
  const std::string header = j.dump();

  std::string out;
  out.reserve(4 + header.size() + payload_size(phi.rows(), phi.cols(), phi.kind()));
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  const auto& a = phi.entries();
  for (Index c = 0; c < phi.cols(); ++c) {
    for (Index r = 0; r < phi.rows(); ++r) {
      put_f64(out, a(r, c).real());
      if (!phi.is_real()) put_f64(out, a(r, c).imag());
    }
  }
  return out;
}

FrameHeader decode_frame_header(std::string_view bytes) { return parse(bytes).header; }

SensingMatrix decode_frame(std::string_view bytes, std::optional<ScalarKind> expected) {
  Parsed p = parse(bytes);
  const FrameHeader& h = p.header;
  if (expected && *expected != h.kind) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected a " + to_string(*expected) + " frame, file holds " + to_string(h.kind));
  }
  const std::uint64_t need = payload_size(h.m, h.n, h.kind);
  if (p.payload.size() < need) {
    throw Error(ErrorCode::kTruncatedPayload, "payload has " + std::to_string(p.payload.size()) +
                                                  " bytes, header implies " +
                                                  std::to_string(need));
  }
  if (p.payload.size() > need) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(p.payload.size() - need) + " trailing bytes after payload");
  }
  Eigen::MatrixXcd a(h.m, h.n);
  const char* cursor = p.payload.data();
  for (Index c = 0; c < h.n; ++c) {
    for (Index r = 0; r < h.m; ++r) {
      const double re = get_f64(cursor);
      cursor += 8;
      double im = 0.0;
      if (h.kind == ScalarKind::kComplex) {
        im = get_f64(cursor);
        cursor += 8;
      }
      a(r, c) = Complex(re, im);
    }
  }
  // Tall frames only come from codes; keep whatever shape was saved.
  return SensingMatrix(std::move(a), h.kind, h.info, NormCheck::kWarn, ShapeCheck::kAllowTall);
}

void save_frame(const SensingMatrix& phi, const std::string& path, const SaveOptions& opts) {
  const std::string bytes = encode_frame(phi, opts);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path + "' failed");
}

SensingMatrix load_frame(const std::string& path, std::optional<ScalarKind> expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_frame(bytes, expected);
}

void write_csv(const SensingMatrix& phi, std::ostream& out) {
  out << "row,col,re,im\n";
  const auto& a = phi.entries();
  for (Index c = 0; c < phi.cols(); ++c) {
    for (Index r = 0; r < phi.rows(); ++r) {
      out << r << ',' << c << ',' << format_number(a(r, c).real()) << ','
          << format_number(a(r, c).imag()) << '\n';
    }
  }
}

CsvMatrix read_csv(std::istream& in) {
  struct Entry {
    Index row, col;
    double re, im;
  };
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  Index rows = 0;
  Index cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("row", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3 && cells.size() != 4) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": expected row,col,re[,im]");
    }
    Entry e{};
    try {
      e.row = std::stoll(cells[0]);
      e.col = std::stoll(cells[1]);
      e.re = std::stod(cells[2]);
      e.im = cells.size() == 4 ? std::stod(cells[3]) : 0.0;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": unparsable number");
    }
    if (e.row < 0 || e.col < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": negative index");
    }
    rows = std::max(rows, e.row + 1);
    cols = std::max(cols, e.col + 1);
    entries.push_back(e);
  }
  if (entries.empty()) throw Error(ErrorCode::kInvalidArgument, "CSV holds no entries");
  if (static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) != entries.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(entries.size()) + " entries do not fill a " +
                    std::to_string(rows) + " x " + std::to_string(cols) + " matrix");
  }
  CsvMatrix out;
  out.entries = Eigen::MatrixXcd::Constant(rows, cols, Complex(std::nan(""), 0.0));
  std::vector<bool> seen(entries.size(), false);
  for (const auto& e : entries) {
    const auto slot = static_cast<std::size_t>(e.col * rows + e.row);
    if (seen[slot]) {
      throw Error(ErrorCode::kDimensionMismatch, "entry (" + std::to_string(e.row) + ", " +
                                                     std::to_string(e.col) +
                                                     ") appears twice");
    }
    seen[slot] = true;
    out.entries(e.row, e.col) = Complex(e.re, e.im);
    if (e.im != 0.0) out.kind = ScalarKind::kComplex;
  }
  return out;
}

}  // namespace striplab
