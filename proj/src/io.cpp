#include "phonoq/io.hpp"

#include <charconv>
#include "phonoq/detail/format.hpp"
#include <fstream>
#include <sstream>

namespace phonoq::io {

namespace {

constexpr const char* kColumnRow = "re_alpha,im_alpha,value,shots,dark_counts";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(phonoq::detail::format("line {}: bad {} value '{}'", line_no, what, s));
  }
  return value;
}

long long parse_int(const std::string& s, std::size_t line_no, const char* what) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  long long value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(phonoq::detail::format("line {}: bad {} value '{}'", line_no, what, s));
  }
  return value;
}

}  // namespace

std::string format_double(double v) { return phonoq::detail::format("{}", v); }

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string hash_hex(const json& j) { return phonoq::detail::format("{:016x}", fnv1a64(j.dump())); }

std::string qsamples_to_csv(const QSamples& samples, const json& header) {
  std::ostringstream out;
  out << "# " << header.dump() << "\n";
  out << kColumnRow << "\n";
  for (const QSample& s : samples.samples) {
    out << format_double(s.alpha.real()) << ',' << format_double(s.alpha.imag()) << ','
        << format_double(s.q_estimate) << ',' << s.shots << ',' << s.dark_counts << "\n";
  }
  return out.str();
}

QSamples qsamples_from_csv(const std::string& text, json* header_out) {
  std::istringstream in(text);
  std::string line;
  std::string header_text;
  QSamples out;
  bool saw_columns = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (saw_columns) throw ParseError(phonoq::detail::format("line {}: comment after data", line_no));
      std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
      header_text += line.substr(start);
      continue;
    }
    if (!saw_columns) {
      if (line != kColumnRow) {
        throw ParseError(phonoq::detail::format("line {}: expected column row '{}'", line_no, kColumnRow));
      }
      saw_columns = true;
      continue;
    }
    std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 5) {
      throw ParseError(phonoq::detail::format("line {}: expected 5 fields, got {}", line_no, fields.size()));
    }
    QSample s{};
    s.alpha = Complex(parse_double(fields[0], line_no, "re_alpha"),
                      parse_double(fields[1], line_no, "im_alpha"));
    s.q_estimate = parse_double(fields[2], line_no, "value");
    s.shots = parse_int(fields[3], line_no, "shots");
    s.dark_counts = parse_int(fields[4], line_no, "dark_counts");
    if (s.q_estimate < 0.0) throw ParseError(phonoq::detail::format("line {}: negative value", line_no));
    if (s.shots == 0 || s.shots < kExactShotsMarker) {
      throw ParseError(phonoq::detail::format("line {}: shots must be positive or the exact marker {}",
                                   line_no, kExactShotsMarker));
    }
    out.samples.push_back(s);
  }
  if (!saw_columns || out.samples.empty()) throw ParseError("no data rows found");

  json header = json::object();
  if (!header_text.empty()) {
    try {
      header = json::parse(header_text);
    } catch (const json::parse_error& e) {
      throw ParseError(phonoq::detail::format("header: {}", e.what()));
    }
  }
  out.layout = header.value("layout", std::string("custom"));
  out.exact = true;
  for (const QSample& s : out.samples) {
    if (s.shots != kExactShotsMarker) out.exact = false;
  }
  if (header_out != nullptr) *header_out = header;
  return out;
}

json matrix_to_json(const Mat& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

Mat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
    throw ParseError("matrix json needs rows, cols, entries");
  }
  Eigen::Index rows = j["rows"].get<Eigen::Index>();
  Eigen::Index cols = j["cols"].get<Eigen::Index>();
  const json& entries = j["entries"];
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != rows * cols) {
    throw ParseError("matrix entries length does not match rows*cols");
  }
  Mat m(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
      const json& pair = entries[idx];
      if (!pair.is_array() || pair.size() != 2) throw ParseError("matrix entry must be [re, im]");
      m(i, j2) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
  }
  return m;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(phonoq::detail::format("cannot open {} for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(phonoq::detail::format("write failed for {}", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(phonoq::detail::format("rename to {} failed: {}", path.string(), ec.message()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(phonoq::detail::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace phonoq::io
