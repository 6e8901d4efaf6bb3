#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "striplab/frame.hpp"

namespace striplab {

// Shortest decimal string that parses back to exactly `value`.
// Non-finite values print as "inf", "-inf" and "nan".
std::string format_number(double value);

using FieldValue =
    std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string,
                 std::vector<std::string>>;

// Ordered flat record. Dotted keys ("params.m") become nested objects in
// JSON and stay as column names in CSV, so both forms carry the same values.
class Record {
 public:
  Record& add(std::string key, FieldValue value);
  template <typename T>
    requires(std::is_integral_v<T> && !std::is_same_v<T, bool>)
  Record& add(std::string key, T value) {
    if constexpr (std::is_signed_v<T>) {
      return add(std::move(key), FieldValue(static_cast<std::int64_t>(value)));
    } else {
      return add(std::move(key), FieldValue(static_cast<std::uint64_t>(value)));
    }
  }
  Record& add(std::string key, const char* value) {
    return add(std::move(key), std::string(value));
  }
  Record& append(const Record& other, const std::string& prefix = {});

  const std::vector<std::pair<std::string, FieldValue>>& fields() const noexcept {
    return fields_;
  }

 private:
  std::vector<std::pair<std::string, FieldValue>> fields_;
};

// Pretty-printed JSON object (two-space indent), trailing newline.
std::string to_json(const Record& record);

// Header line plus one value line; lists are joined with ';'.
std::string to_csv(const Record& record);
std::string csv_header(const Record& record);
std::string csv_values(const Record& record);

// Frame summary row: family, m, N, scalar, params, seed, mu, mu-bar-sq,
// spectral-norm, coherence-invariant, tight-frame-defect, warnings.
Record frame_report(const SensingMatrix& phi, const CoherenceProfile& profile);

}  // namespace striplab
