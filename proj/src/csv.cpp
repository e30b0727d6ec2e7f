#include "dcornet/csv.hpp"

#include <fstream>
#include <sstream>

#include "dcornet/error.hpp"

namespace dcornet::csv {

namespace {

std::string where(std::string_view source, std::size_t line) {
    std::ostringstream os;
    os << source << ":" << line << ": ";
    return os.str();
}

// Returns false at EOF. `line` is advanced past every physical line consumed.
bool next_record(std::istream& in, std::string_view source, std::size_t& line, Row& row) {
    std::string text;
    while (true) {
        if (!std::getline(in, text)) return false;
        ++line;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.empty() || text.front() == '#') continue;
        break;
    }
    row.line = line;
    row.fields.clear();

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == text.size()) {
            if (!quoted) break;
            // quoted field spans a newline
            std::string more;
            if (!std::getline(in, more)) {
                throw InputError(where(source, row.line) + "unterminated quoted field");
            }
            ++line;
            if (!more.empty() && more.back() == '\r') more.pop_back();
            field += '\n';
            text = std::move(more);
            i = 0;
            continue;
        }
        const char c = text[i++];
        if (quoted) {
            if (c == '"') {
                if (i < text.size() && text[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    row.fields.push_back(std::move(field));
    return true;
}

}  // namespace

std::size_t Table::column(std::string_view name, std::string_view source) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw InputError(std::string(source) + ": missing column '" + std::string(name) + "'");
}

Table read(std::istream& in, std::string_view source) {
    Table table;
    std::size_t line = 0;
    Row row;
    if (!next_record(in, source, line, row)) {
        throw InputError(std::string(source) + ": empty file (no header)");
    }
    table.header = std::move(row.fields);
    for (auto& h : table.header) {
        // tolerate a UTF-8 byte-order mark on the first header cell
        if (h.rfind("\xEF\xBB\xBF", 0) == 0) h.erase(0, 3);
    }
    while (next_record(in, source, line, row)) {
        if (row.fields.size() != table.header.size()) {
            std::ostringstream os;
            os << where(source, row.line) << "expected " << table.header.size()
               << " fields, found " << row.fields.size();
            throw InputError(os.str());
        }
        table.rows.push_back(row);
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read(in, path);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace dcornet::csv
