#include <zdclone/nat.hpp>

#include <cctype>
#include <stdexcept>

namespace zdclone {

Nat parse_nat(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_nat: empty string");
  for (char ch : text) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw std::invalid_argument("parse_nat: not a natural number: '" + text + "'");
  }
  return Nat(text);
}

Rat parse_rat(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rat(parse_nat(text));
  Nat num = parse_nat(text.substr(0, slash));
  Nat den = parse_nat(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + text + "'");
  return Rat(num, den);
}

}  // namespace zdclone
