#include "carleson/rational.hpp"

#include <cctype>

#include "carleson/errors.hpp"

namespace carleson {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string_view exp_text = text.substr(e + 1);
    bool negative_exp = false;
    if (!exp_text.empty() && (exp_text[0] == '+' || exp_text[0] == '-')) {
      negative_exp = exp_text[0] == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) {
      throw ParseError("malformed rational '" + std::string(original) + "'");
    }
    exponent = std::stol(std::string(exp_text));
    if (negative_exp) exponent = -exponent;
  }
  std::string digits;
  auto dot = mantissa.find('.');
  std::string_view whole = mantissa.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : mantissa.substr(dot + 1);
  if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
      (!frac.empty() && !all_digits(frac)) || (dot != std::string_view::npos && frac.empty() && whole.empty())) {
    throw ParseError("malformed rational '" + std::string(original) + "'");
  }
  digits.append(whole);
  digits.append(frac);
  exponent -= static_cast<long>(frac.size());
  mpz_class numerator(digits.empty() ? "0" : digits, 10);
  Rational value(numerator);
  if (exponent > 0) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
    value *= scale;
  } else if (exponent < 0) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(-exponent));
    value /= scale;
  }
  value.canonicalize();
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) throw ParseError("empty rational '" + std::string(original) + "'");

  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw ParseError("malformed rational '" + std::string(original) + "'");
    }
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(original) + "'");
    value = ratio(mpz_class(std::string(num), 10), d);
  } else {
    value = parse_decimal(text, original);
  }
  if (negative) value = -value;
  return value;
}

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational pow2_neg(unsigned k) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, k);
  return ratio(mpz_class(1), den);
}

Rational pow(const Rational& base, unsigned k) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), k);
  Rational out(num, den);
  out.canonicalize();
  return out;
}

std::int64_t floor_to_int(const Rational& value) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q.get_si();
}

}  // namespace carleson
