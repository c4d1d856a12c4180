#include "sparselr/json_lines.hpp"

#include <cctype>

namespace sparselr {

namespace {

class Scanner {
public:
    Scanner(std::string_view text, std::map<std::string, int>& out) : text_(text), out_(out) {}

    void run() {
        skip_ws();
        value("");
    }

private:
    std::string_view text_;
    std::map<std::string, int>& out_;
    std::size_t pos_ = 0;
    int line_ = 1;

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    void advance() {
        if (peek() == '\n') ++line_;
        ++pos_;
    }

    void skip_ws() {
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    std::string string_token() {
        std::string s;
        advance();  // opening quote
        while (!done() && peek() != '"') {
            if (peek() == '\\') {
                advance();
                if (done()) break;
            }
            s.push_back(peek());
            advance();
        }
        if (!done()) advance();
        return s;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out.push_back(c);
        }
        return out;
    }

    void value(const std::string& pointer) {
        skip_ws();
        if (done()) return;
        out_.emplace(pointer, line_);
        const char c = peek();
        if (c == '{') {
            advance();
            skip_ws();
            while (!done() && peek() != '}') {
                if (peek() != '"') return;  // malformed; the real parser reports it
                const std::string key = string_token();
                skip_ws();
                if (peek() != ':') return;
                advance();
                value(pointer + "/" + escape(key));
                skip_ws();
                if (peek() == ',') {
                    advance();
                    skip_ws();
                }
            }
            if (!done()) advance();
        } else if (c == '[') {
            advance();
            skip_ws();
            int index = 0;
            while (!done() && peek() != ']') {
                value(pointer + "/" + std::to_string(index++));
                skip_ws();
                if (peek() == ',') {
                    advance();
                    skip_ws();
                } else if (peek() != ']') {
                    return;
                }
            }
            if (!done()) advance();
        } else if (c == '"') {
            string_token();
        } else {
            while (!done() && peek() != ',' && peek() != '}' && peek() != ']' &&
                   !std::isspace(static_cast<unsigned char>(peek())))
                advance();
        }
    }
};

}  // namespace

JsonLineIndex::JsonLineIndex(std::string_view text) {
    Scanner(text, lines_).run();
}

int JsonLineIndex::line_of(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
        if (auto it = lines_.find(p); it != lines_.end()) return it->second;
        if (p.empty()) return 0;
        p.erase(p.rfind('/'));
    }
}

int JsonLineIndex::line_at_offset(std::string_view text, std::size_t offset) {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace sparselr
