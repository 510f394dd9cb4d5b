#include "stm/rational.hpp"

#include "stm/error.hpp"

#include <cctype>

namespace stm {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::parse_error: return "ParseError";
    case Errc::negative_entry: return "NegativeEntry";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::too_few_taxa: return "TooFewTaxa";
    case Errc::size_mismatch: return "SizeMismatch";
    case Errc::bad_indices: return "BadIndices";
    case Errc::not_a_partition: return "NotAPartition";
    case Errc::not_tree_metric: return "NotTreeMetric";
    case Errc::wrong_split: return "WrongSplit";
    case Errc::not_in_image: return "NotInImage";
    case Errc::star_input: return "StarInput";
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::postcondition_violation: return "PostconditionViolation";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::unsupported: return "Unsupported";
    }
    return "Error";
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rational parse_rational(const std::string& s) {
    std::string body = s;
    bool negative = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
        negative = body[0] == '-';
        body = body.substr(1);
    }
    if (body.empty()) throw Error(Errc::parse_error, "empty rational '" + s + "'");

    Rational value;
    auto slash = body.find('/');
    auto dot = body.find('.');
    if (slash != std::string::npos) {
        std::string num = body.substr(0, slash);
        std::string den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw Error(Errc::parse_error, "bad rational '" + s + "'");
        mpz_class d(den);
        if (d == 0) throw Error(Errc::parse_error, "zero denominator in '" + s + "'");
        value = Rational(mpz_class(num), d);
        value.canonicalize();
    } else if (dot != std::string::npos) {
        std::string ip = body.substr(0, dot);
        std::string fp = body.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (fp.empty()) fp = "0";
        if (!all_digits(ip) || !all_digits(fp))
            throw Error(Errc::parse_error, "bad decimal '" + s + "'");
        mpz_class den = 1;
        for (size_t i = 0; i < fp.size(); ++i) den *= 10;
        mpz_class num = mpz_class(ip) * den + mpz_class(fp);
        value = Rational(num, den);
        value.canonicalize();
    } else {
        if (!all_digits(body)) throw Error(Errc::parse_error, "bad integer '" + s + "'");
        value = Rational(mpz_class(body));
    }
    if (negative) value = -value;
    return value;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_decimal_string(const Rational& q, int digits) {
    if (digits < 0) digits = 0;
    mpz_class scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    mpz_class num = q.get_num() * scale * 2;
    mpz_class den = q.get_den() * 2;
    // round half away from zero
    if (num >= 0)
        num += q.get_den();
    else
        num -= q.get_den();
    mpz_class scaled = num / den;
    bool neg = scaled < 0;
    mpz_class a = abs(scaled);
    mpz_class ip = a / scale;
    mpz_class fp = a % scale;
    std::string out = (neg ? "-" : "") + ip.get_str();
    if (digits > 0) {
        std::string f = fp.get_str();
        out += "." + std::string(static_cast<size_t>(digits) - f.size(), '0') + f;
    }
    return out;
}

} // namespace stm
