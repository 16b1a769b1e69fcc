#include "fbgain/format.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace fbgain {

std::string format_number(double value, int precision) {
  if (precision < 1 || precision > 17) throw std::domain_error("precision must be in [1, 17]");
  std::array<char, 64> buf{};
  const auto [end, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, precision);
  if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf.data(), end);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw std::invalid_argument("not a number: " + std::string(text));
  }
  return value;
}

}  // namespace fbgain
