#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace uai {

// Deterministic JSON emitter: fields appear exactly in call order, doubles are
// printed with %.17g, infinities become the strings "inf"/"-inf".  This is
// what makes golden-file CLI tests byte-stable; a general-purpose JSON
// library would re-order or re-round.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    void begin_object() {
        sep();
        os_ << '{';
        stack_.push_back(false);
    }
    void end_object() {
        os_ << '}';
        stack_.pop_back();
    }
    void begin_array() {
        sep();
        os_ << '[';
        stack_.push_back(false);
    }
    void end_array() {
        os_ << ']';
        stack_.pop_back();
    }

    void key(const char* k) {
        sep();
        write_string(k);
        os_ << ':';
        after_key_ = true;
    }

    void value_number(double v) {
        sep();
        if (std::isnan(v)) {
            os_ << "\"nan\"";
        } else if (std::isinf(v)) {
            os_ << (v > 0 ? "\"inf\"" : "\"-inf\"");
        } else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os_ << buf;
        }
    }
    void value_int(long long v) {
        sep();
        os_ << v;
    }
    void value_uint(unsigned long long v) {
        sep();
        os_ << v;
    }
    void value_bool(bool v) {
        sep();
        os_ << (v ? "true" : "false");
    }
    void value_string(const std::string& s) {
        sep();
        write_string(s);
    }
    void value_null() {
        sep();
        os_ << "null";
    }

private:
    void sep() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (!stack_.empty()) {
            if (stack_.back()) os_ << ',';
            stack_.back() = true;
        }
    }

    void write_string(const std::string& s) {
        os_ << '"';
        for (char c : s) {
            switch (c) {
                case '"': os_ << "\\\""; break;
                case '\\': os_ << "\\\\"; break;
                case '\n': os_ << "\\n"; break;
                case '\r': os_ << "\\r"; break;
                case '\t': os_ << "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        os_ << buf;
                    } else {
                        os_ << c;
                    }
            }
        }
        os_ << '"';
    }

    std::ostream& os_;
    std::vector<bool> stack_;
    bool after_key_ = false;
};

} // namespace uai
