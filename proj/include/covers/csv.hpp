#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "covers/error.hpp"
#include "covers/relation.hpp"

namespace covers {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180 basics: comma separation, double-quote fields, "" escapes a quote.
// First line is the header. Trailing newline optional.
inline CsvTable parse_csv(const std::string& text, const std::string& origin = "<csv>") {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        if (table.header.empty() && table.rows.empty() && record_started)
            table.header = record;
        else
            table.rows.push_back(record);
        record.clear();
        record_started = false;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw ParseError(origin + ": stray quote inside unquoted field");
                in_quotes = true;
                field_started = true;
                record_started = true;
                break;
            case ',':
                end_field();
                record_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (record_started || field_started) end_record();
                break;
            default:
                field += c;
                field_started = true;
                record_started = true;
        }
    }
    if (in_quotes) throw ParseError(origin + ": unterminated quoted field");
    if (record_started || field_started) end_record();

    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw ParseError(origin + ": row arity differs from header");
    }
    return table;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// CSV relation file: header line of attribute names, then value rows.
// Duplicate rows are silently deduplicated (relations are sets).
inline Relation load_relation_csv(const std::string& path) {
    CsvTable t = parse_csv(read_file(path), path);
    if (t.header.empty()) throw ParseError(path + ": missing header line");
    return Relation(Schema{t.header}, std::move(t.rows));
}

inline std::string csv_escape(const std::string& v) {
    if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::string write_csv(const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(header[i]);
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string write_relation_csv(const Relation& r) {
    return write_csv(r.schema().attrs(), r.rows());
}

} // namespace covers
