#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

// Minimal substitute for std::format covering the specs this codebase uses:
// {}, {:.3e}, {:.6g}, {:016x}. libstdc++ 11 ships no <format>.
namespace phonoq::detail {

inline std::string shortest_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline void append_arg(std::string& out, std::string_view spec, double v) {
  if (spec.empty()) {
    out += shortest_double(v);
    return;
  }
  char f[24];
  std::snprintf(f, sizeof(f), "%%%.*s", static_cast<int>(spec.size()), spec.data());
  char buf[96];
  std::snprintf(buf, sizeof(buf), f, v);
  out += buf;
}

template <std::integral T>
void append_arg(std::string& out, std::string_view spec, T v) {
  if (spec == "016x") {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    out += buf;
    return;
  }
  out += std::to_string(v);
}

inline void append_arg(std::string& out, std::string_view, const std::string& v) { out += v; }
inline void append_arg(std::string& out, std::string_view, std::string_view v) { out += v; }
inline void append_arg(std::string& out, std::string_view, const char* v) { out += v; }
inline void append_arg(std::string& out, std::string_view, char v) { out += v; }

template <typename... Args>
std::string format(std::string_view fmt, const Args&... args) {
  std::vector<std::function<void(std::string&, std::string_view)>> appenders;
  appenders.reserve(sizeof...(Args));
  (appenders.emplace_back(
       [&args](std::string& o, std::string_view s) { append_arg(o, s, args); }),
   ...);

  std::string out;
  out.reserve(fmt.size() + 32);
  std::size_t next = 0;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    char c = fmt[i];
    if (c == '{') {
      if (i + 1 < fmt.size() && fmt[i + 1] == '{') {
        out += '{';
        ++i;
        continue;
      }
      std::size_t close = fmt.find('}', i);
      if (close == std::string_view::npos || next >= appenders.size()) {
        out += fmt.substr(i);
        break;
      }
      std::string_view inner = fmt.substr(i + 1, close - i - 1);
      if (!inner.empty() && inner.front() == ':') inner.remove_prefix(1);
      appenders[next++](out, inner);
      i = close;
    } else if (c == '}') {
      if (i + 1 < fmt.size() && fmt[i + 1] == '}') ++i;
      out += '}';
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace phonoq::detail
