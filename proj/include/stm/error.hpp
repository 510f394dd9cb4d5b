#pragma once

#include <stdexcept>
#include <string>

namespace stm {

enum class Errc {
    parse_error,
    negative_entry,
    length_mismatch,
    too_few_taxa,
    size_mismatch,
    bad_indices,
    not_a_partition,
    not_tree_metric,
    wrong_split,
    not_in_image,
    star_input,
    out_of_domain,
    postcondition_violation,
    budget_exceeded,
    unsupported,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace stm
