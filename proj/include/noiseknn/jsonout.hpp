#pragma once

// Minimal streaming JSON writer for machine output.
//
// Written by hand instead of using the vendored DOM library for one reason:
// byte determinism. Keys appear exactly in insertion order and numbers are
// rendered by std::to_chars, which produces the shortest decimal string
// that round-trips — so identical inputs always serialize to identical
// bytes, which the output-stability guarantees depend on. The vendored
// library is still used for *parsing* (spec files, configs, data records),
// where byte layout does not matter.
//
// Non-finite doubles have no JSON representation and are emitted as null;
// writers that need them should encode availability explicitly instead.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace noiseknn {

inline std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

// Shortest round-trip decimal rendering of a double.
inline std::string json_number(double d) {
    if (!std::isfinite(d)) return "null";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
    (void)ec;
    return std::string(buf, p);
}

class JsonWriter {
  public:
    void begin_object() {
        separate();
        out_ += '{';
        stack_.push_back(false);
    }

    void end_object() {
        out_ += '}';
        stack_.pop_back();
        mark_written();
    }

    void begin_array() {
        separate();
        out_ += '[';
        stack_.push_back(false);
    }

    void end_array() {
        out_ += ']';
        stack_.pop_back();
        mark_written();
    }

    void key(std::string_view k) {
        separate();
        out_ += '"';
        out_ += json_escape(k);
        out_ += "\":";
        pending_key_ = true;
    }

    void value(double d) { raw(json_number(d)); }
    void value(std::int64_t v) { raw(integer(v)); }
    void value(std::uint64_t v) { raw(integer(v)); }
    void value(int v) { raw(integer(static_cast<std::int64_t>(v))); }
    void value(unsigned v) { raw(integer(static_cast<std::uint64_t>(v))); }
    void value(bool b) { raw(b ? "true" : "false"); }
    void value(std::string_view s) { raw('"' + json_escape(s) + '"'); }
    void value(const char* s) { value(std::string_view(s)); }
    void null_value() { raw("null"); }

    // Convenience for the common key-then-scalar pattern.
    template <class T>
    void field(std::string_view k, T v) {
        key(k);
        value(v);
    }

    const std::string& str() const { return out_; }

  private:
    template <class Int>
    static std::string integer(Int v) {
        char buf[24];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        (void)ec;
        return std::string(buf, p);
    }

    void separate() {
        if (pending_key_) return;  // value directly after its key
        if (!stack_.empty() && stack_.back()) out_ += ',';
    }

    void mark_written() {
        pending_key_ = false;
        if (!stack_.empty()) stack_.back() = true;
    }

    void raw(std::string_view text) {
        separate();
        out_ += text;
        mark_written();
    }

    std::string out_;
    std::vector<bool> stack_;  // per open container: "already holds an element"
    bool pending_key_ = false;
};

}  // namespace noiseknn
