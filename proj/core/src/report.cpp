#include "striplab/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace striplab {

namespace {

using Json = nlohmann::ordered_json;

Json to_json_value(const FieldValue& value) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      value);
}

std::string csv_cell(const FieldValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_integral_v<T>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          std::string joined;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) joined += ';';
            joined += v[i];
          }
          return joined;
        }
      },
      value);
}

std::string quote_csv(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (const char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

Record& Record::add(std::string key, FieldValue value) {
  fields_.emplace_back(std::move(key), std::move(value));
  return *this;
}

Record& Record::append(const Record& other, const std::string& prefix) {
  for (const auto& [key, value] : other.fields()) {
    fields_.emplace_back(prefix.empty() ? key : prefix + "." + key, value);
  }
  return *this;
}

std::string to_json(const Record& record) {
  Json root = Json::object();
  for (const auto& [key, value] : record.fields()) {
    Json* node = &root;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos;
         dot = key.find('.', start)) {
      node = &(*node)[key.substr(start, dot - start)];
      start = dot + 1;
    }
    (*node)[key.substr(start)] = to_json_value(value);
  }
  return root.dump(2) + "\n";
}

std::string csv_header(const Record& record) {
  std::string line;
  for (std::size_t i = 0; i < record.fields().size(); ++i) {
    if (i) line += ',';
    line += quote_csv(record.fields()[i].first);
  }
  return line;
}

std::string csv_values(const Record& record) {
  std::string line;
  for (std::size_t i = 0; i < record.fields().size(); ++i) {
    if (i) line += ',';
    line += quote_csv(csv_cell(record.fields()[i].second));
  }
  return line;
}

std::string to_csv(const Record& record) {
  return csv_header(record) + "\n" + csv_values(record) + "\n";
}

Record frame_report(const SensingMatrix& phi, const CoherenceProfile& profile) {
  const FrameInfo& info = phi.info();
  Record r;
  r.add("family", info.family);
  r.add("m", static_cast<std::int64_t>(phi.rows()));
  r.add("N", static_cast<std::int64_t>(phi.cols()));
  r.add("scalar", to_string(phi.kind()));
  for (const auto& [key, value] : info.params) {
    if (value == std::floor(value) && std::abs(value) < 9.0e15) {
      r.add("params." + key, static_cast<std::int64_t>(value));
    } else {
      r.add("params." + key, value);
    }
  }
  if (info.seed) {
    r.add("seed", *info.seed);
  } else {
    r.add("seed", std::monostate{});
  }
  r.add("mu", profile.mu);
  r.add("mu-bar-sq", profile.mu_bar_sq);
  r.add("spectral-norm", profile.spectral_norm);
  r.add("coherence-invariant", profile.coherence_invariant);
  r.add("tight-frame-defect", profile.tight_frame_defect);
  r.add("warnings", info.warnings);
  return r;
}

}  // namespace striplab
