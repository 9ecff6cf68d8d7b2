#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "duetdyn/model.hpp"

namespace duetdyn {

namespace {

[[noreturn]] void bad(std::string_view text) {
    throw ValidationError("malformed complex literal '" + std::string(text) + "' (expected a+bi)");
}

double parse_real(std::string_view part, std::string_view whole) {
    if (!part.empty() && part.front() == '+') part.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size() || !std::isfinite(value)) bad(whole);
    return value;
}

double parse_imag_coefficient(std::string_view part, std::string_view whole) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_real(part, whole);
}

} // namespace

Complex parse_complex_literal(std::string_view text) {
    std::string compact;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') compact.push_back(ch);
    const std::string_view s = compact;
    if (s.empty()) bad(text);
    if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, text), 0.0};

    const std::string_view body = s.substr(0, s.size() - 1);
    // The real/imaginary split is the last sign that is neither leading nor
    // part of an exponent.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string_view::npos) return {0.0, parse_imag_coefficient(body, text)};
    return {parse_real(body.substr(0, split), text), parse_imag_coefficient(body.substr(split), text)};
}

std::string format_complex_literal(Complex z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

} // namespace duetdyn
