#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace otkg::csv {

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Returns false at end of input. `line()` is the 1-based line on which the
    /// returned record started.
    bool next(std::vector<std::string>& fields);
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t current_line_ = 1;
    std::size_t record_line_ = 0;
};

/// Maps header names to column positions.
class Header {
public:
    Header() = default;
    explicit Header(std::vector<std::string> names);

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws MissingColumn naming `source` when absent.
    std::size_t require(std::string_view name, std::string_view source) const;
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace otkg::csv
