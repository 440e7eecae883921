#include "mdepth/format.hpp"

#include "mdepth/errors.hpp"

#include <charconv>

namespace mdepth {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const char* what) {
  std::size_t b = field.find_first_not_of(" \t\r\n");
  std::size_t e = field.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) throw InvalidArgument(std::string("empty numeric field in ") + what);
  const char* first = field.data() + b;
  const char* last = field.data() + e + 1;
  if (*first == '+') ++first;
  double v = 0.0;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InvalidArgument(std::string("cannot parse '") + field + "' as a number in " + what);
  }
  return v;
}

}  // namespace mdepth
