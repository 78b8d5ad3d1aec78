#include "otkg/csv.hpp"

#include "otkg/error.hpp"

namespace otkg::csv {

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    int ch = in_.get();
    if (ch == EOF) {
        return false;
    }
    record_line_ = current_line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    while (true) {
        if (ch == EOF) {
            fields.push_back(std::move(field));
            return true;
        }
        const char c = static_cast<char>(ch);
        if (quoted) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') {
                    ++current_line_;
                }
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in_.peek() == '\n') {
                in_.get();
            }
            ++current_line_;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
            field_started = true;
        }
        ch = in_.get();
    }
}

Header::Header(std::vector<std::string> names) : names_(std::move(names)) {
    // Tolerate a UTF-8 byte order mark on the first column.
    if (!names_.empty() && names_.front().rfind("\xEF\xBB\xBF", 0) == 0) {
        names_.front().erase(0, 3);
    }
}

std::optional<std::size_t> Header::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t Header::require(std::string_view name, std::string_view source) const {
    if (auto pos = find(name)) {
        return *pos;
    }
    fail(ErrorCode::MissingColumn,
         std::string(source) + ": missing column '" + std::string(name) + "'");
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            out << ',';
        }
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace otkg::csv
