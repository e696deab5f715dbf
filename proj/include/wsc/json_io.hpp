#pragma once

#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "wsc/common.hpp"

namespace wsc {

// All exported JSON goes through this writer so output is byte-stable across
// runs: keys appear in insertion order and doubles are printed with 17
// significant digits (lossless for binary64 round trips).
class JsonWriter {
public:
    JsonWriter& begin_object() { return token("{", /*value=*/false); }
    JsonWriter& end_object() { return close("}"); }
    JsonWriter& begin_array() { return token("[", /*value=*/false); }
    JsonWriter& end_array() { return close("]"); }

    JsonWriter& key(const std::string& k) {
        sep();
        out_ += '"';
        escape(k);
        out_ += "\":";
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return token(format_double(v), true); }
    JsonWriter& value(int v) { return token(std::to_string(v), true); }
    JsonWriter& value(std::int64_t v) { return token(std::to_string(v), true); }
    JsonWriter& value(std::uint64_t v) { return token(std::to_string(v), true); }
    JsonWriter& value(bool v) { return token(v ? "true" : "false", true); }
    JsonWriter& value(const std::string& v) {
        sep();
        out_ += '"';
        escape(v);
        out_ += '"';
        pending_value_ = false;
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }

    JsonWriter& value(const Vec& v) {
        begin_array();
        for (Eigen::Index i = 0; i < v.size(); ++i) value(v[i]);
        return end_array();
    }
    JsonWriter& value(const Mat& m) {
        begin_array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            begin_array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) value(m(r, c));
            end_array();
        }
        return end_array();
    }

    template <class T>
    JsonWriter& field(const std::string& k, const T& v) {
        key(k);
        return value(v);
    }

    const std::string& str() const { return out_; }

    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

private:
    JsonWriter& token(const std::string& t, bool value) {
        sep();
        out_ += t;
        pending_value_ = false;
        if (!value) needs_comma_.push_back(false);
        return *this;
    }
    JsonWriter& close(const char* t) {
        out_ += t;
        if (!needs_comma_.empty()) needs_comma_.pop_back();
        return *this;
    }
    void sep() {
        if (pending_value_) return;  // directly after a key
        if (!needs_comma_.empty()) {
            if (needs_comma_.back()) out_ += ',';
            needs_comma_.back() = true;
        }
    }
    void escape(const std::string& s) {
        for (char ch : s) {
            switch (ch) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default: out_ += ch;
            }
        }
    }

    std::string out_;
    std::vector<bool> needs_comma_;
    bool pending_value_ = false;
};

namespace jsonio {

using json = nlohmann::json;

inline json parse(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

inline const json& at(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw ValidationError(path + "/" + key + ": missing required field");
    return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path + ": expected a number");
    return j.get<double>();
}

inline int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ValidationError(path + ": expected an integer");
    return j.get<int>();
}

inline Mat as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ValidationError(path + ": expected a non-empty 2d array");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Mat m;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j[r];
        const std::string rpath = path + "/" + std::to_string(r);
        if (!row.is_array() || row.empty())
            throw ValidationError(rpath + ": expected a non-empty array");
        if (r == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw ValidationError(rpath + ": ragged row (expected " + std::to_string(cols) +
                                  " entries, got " + std::to_string(row.size()) + ")");
        }
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                as_number(row[c], rpath + "/" + std::to_string(c));
    }
    return m;
}

inline Vec as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "/" + std::to_string(i));
    return v;
}

}  // namespace jsonio
}  // namespace wsc
