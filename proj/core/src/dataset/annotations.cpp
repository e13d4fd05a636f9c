#include "catgan/dataset/annotations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

namespace catgan::dataset {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

constexpr std::size_t kFields = 1 + 2 * metrics::kActionUnits + 2;

template <typename V>
bool parse_number(const std::string& token, V& out) {
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::istream& in) {
  std::map<std::uint64_t, AnnotationRecord> by_frame;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.size() != kFields) {
      throw ParseError(line_no, "expected " + std::to_string(kFields) + " fields, found " + std::to_string(tok.size()));
    }

    AnnotationRecord r;
    if (!parse_number(tok[0], r.frame)) throw ParseError(line_no, "frame '" + tok[0] + "' is not a non-negative integer");
    for (std::size_t k = 0; k < metrics::kActionUnits; ++k) {
      const auto& p = tok[1 + 2 * k];
      const auto& q = tok[2 + 2 * k];
      const std::string au = "AU" + std::to_string(metrics::kActionUnitIds[k]);
      if (p != "0" && p != "1") throw ParseError(line_no, au + " presence '" + p + "' is not 0 or 1");
      unsigned intensity = 0;
      if (!parse_number(q, intensity) || intensity > 255) {
        throw ParseError(line_no, au + " intensity '" + q + "' is not a small non-negative integer");
      }
      r.au_presence[k] = p == "1";
      r.au_intensity[k] = static_cast<std::uint8_t>(intensity);
      if ((intensity > 0) != (r.au_presence[k] == 1)) {
        throw ParseError(line_no, au + " has presence " + p + " with intensity " + q);
      }
    }
    for (auto [slot, name, idx] : {std::tuple{&r.valence, "valence", kFields - 2},
                                   std::tuple{&r.arousal, "arousal", kFields - 1}}) {
      if (!parse_number(tok[idx], *slot) || !std::isfinite(*slot)) {
        throw ParseError(line_no, std::string(name) + " '" + tok[idx] + "' is not a number");
      }
      if (*slot < -1.0 || *slot > 1.0) throw ParseError(line_no, std::string(name) + " " + tok[idx] + " outside [-1, 1]");
    }
    if (!by_frame.emplace(r.frame, r).second) {
      throw ParseError(line_no, "duplicate frame " + std::to_string(r.frame));
    }
  }
  std::vector<AnnotationRecord> out;
  out.reserve(by_frame.size());
  for (auto& [frame, rec] : by_frame) out.push_back(rec);
  return out;
}

std::vector<double> interpolate_va(const std::vector<double>& values, double src_fps, double dst_fps) {
  if (!(src_fps > 0.0) || !(dst_fps > 0.0)) throw std::invalid_argument("interpolate_va: frame rates must be positive");
  if (values.empty()) throw std::invalid_argument("interpolate_va: no values");
  if (values.size() == 1) {
    const auto copies = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(dst_fps / src_fps)));
    return std::vector<double>(copies, values.front());
  }
  const std::size_t n = values.size();
  const double ratio = src_fps / dst_fps;  // source frames per output frame
  const double span = static_cast<double>(n - 1) / ratio;
  // Output j samples source time j / dst_fps, i.e. source position j * ratio, and
  // never extrapolates past the last value. The tolerance absorbs rounding in span.
  const auto m = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double pos = std::min(static_cast<double>(j) * ratio, static_cast<double>(n - 1));
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double t = pos - static_cast<double>(i);
    out[j] = t == 0.0 ? values[i] : t == 1.0 ? values[i + 1] : std::lerp(values[i], values[i + 1], t);
  }
  return out;
}

std::vector<double> align_lengths(const std::vector<double>& va, std::size_t target_len) {
  const std::size_t diff = va.size() > target_len ? va.size() - target_len : target_len - va.size();
  if (diff > 2) {
    throw std::invalid_argument("align_lengths: " + std::to_string(va.size()) + " values for " +
                                std::to_string(target_len) + " frames; the frame rates likely disagree");
  }
  if (va.empty() && target_len > 0) throw std::invalid_argument("align_lengths: nothing to extend");
  std::vector<double> out(va.begin(), va.begin() + static_cast<std::ptrdiff_t>(std::min(va.size(), target_len)));
  out.resize(target_len, va.empty() ? 0.0 : va.back());
  return out;
}

}  // namespace catgan::dataset
