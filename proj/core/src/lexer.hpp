#pragma once

// Line-oriented tokenizer shared by the model and beliefs readers.

#include "aramaid/model_format.hpp"

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace aramaid::detail
{

enum class Tok
{
    word,
    bar,
    colon,
    comma,
    arrow,
};

struct Token
{
    Tok kind = Tok::word;
    std::string text;
    std::size_t column = 1;
    bool quoted = false;  // word of the form key="..."
};

inline bool is_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!alpha(s.front()))
        return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

class Diagnostics
{
public:
    void error(std::size_t line, std::size_t column, std::string message, std::string text = {})
    {
        items_.push_back({line, column, Severity::error, std::move(message), std::move(text)});
    }
    void warning(std::size_t line, std::size_t column, std::string message, std::string text = {})
    {
        items_.push_back({line, column, Severity::warning, std::move(message), std::move(text)});
    }
    bool has_errors() const
    {
        return std::any_of(items_.begin(), items_.end(), [](const ParseDiagnostic& d) { return d.severity == Severity::error; });
    }
    std::vector<ParseDiagnostic> sorted() const
    {
        auto out = items_;
        std::stable_sort(out.begin(), out.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
            return a.line != b.line ? a.line < b.line : a.column < b.column;
        });
        return out;
    }

private:
    std::vector<ParseDiagnostic> items_;
};

inline bool lex_line(std::string_view line, std::size_t lineno, Diagnostics& diags, std::vector<Token>& out)
{
    out.clear();
    std::size_t i = 0;
    const std::size_t n = line.size();
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    auto is_control = [](char c) { return static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\r'; };
    while (i < n)
    {
        const char c = line[i];
        if (is_space(c))
        {
            ++i;
            continue;
        }
        if (c == '#')
            break;
        if (is_control(c))
        {
            diags.error(lineno, i + 1, "invalid control character");
            return false;
        }
        const std::size_t col = i + 1;
        if (c == '|' || c == ':' || c == ',')
        {
            out.push_back({c == '|' ? Tok::bar : c == ':' ? Tok::colon : Tok::comma, std::string(1, c), col});
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < n && line[i + 1] == '>')
        {
            out.push_back({Tok::arrow, "->", col});
            i += 2;
            continue;
        }
        if (c == '"')
        {
            diags.error(lineno, col, "unexpected quote");
            return false;
        }
        Token t{Tok::word, {}, col};
        while (i < n)
        {
            const char w = line[i];
            if (is_space(w) || w == '|' || w == ':' || w == ',' || w == '#')
                break;
            if (w == '-' && i + 1 < n && line[i + 1] == '>')
                break;
            if (is_control(w))
            {
                diags.error(lineno, i + 1, "invalid control character");
                return false;
            }
            if (w == '"')
            {
                if (t.text.empty() || t.text.back() != '=' || t.quoted)
                {
                    diags.error(lineno, i + 1, "unexpected quote");
                    return false;
                }
                const auto close = line.find('"', i + 1);
                if (close == std::string_view::npos)
                {
                    diags.error(lineno, i + 1, "unterminated string");
                    return false;
                }
                t.text.append(line.substr(i + 1, close - i - 1));
                t.quoted = true;
                i = close + 1;
                continue;
            }
            t.text.push_back(w);
            ++i;
        }
        out.push_back(std::move(t));
    }
    return true;
}

template <class Fn>
void for_each_line(std::string_view text, Diagnostics& diags, Fn&& fn)
{
    std::vector<Token> toks;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++lineno;
        if (lex_line(text.substr(start, end - start), lineno, diags, toks) && !toks.empty())
            fn(toks, lineno);
        if (end == text.size())
            break;
        start = end + 1;
    }
}

/// One `key=value` item; with lists enabled, `key=a,b,c` collects every value.
struct Item
{
    std::string key;
    std::string value;
    std::size_t column = 1;
    std::size_t value_column = 1;
    std::vector<std::string> list;
    std::vector<std::size_t> list_columns;
};

class Cursor
{
public:
    Cursor(const std::vector<Token>& toks, std::size_t line, Diagnostics& diags)
        : toks_(toks), line_(line), diags_(diags)
    {
    }

    std::size_t line() const { return line_; }
    bool at_end() const { return pos_ >= toks_.size(); }
    const Token* peek() const { return at_end() ? nullptr : &toks_[pos_]; }
    void next() { ++pos_; }

    std::size_t column() const { return at_end() ? end_column() : toks_[pos_].column; }

    const Token* word(std::string_view what)
    {
        const Token* t = peek();
        if (!t || t->kind != Tok::word)
        {
            fail("expected " + std::string(what));
            return nullptr;
        }
        ++pos_;
        return t;
    }

    const Token* identifier(std::string_view what)
    {
        const Token* t = peek();
        if (!t || t->kind != Tok::word || !is_identifier(t->text))
        {
            fail("expected " + std::string(what));
            return nullptr;
        }
        ++pos_;
        return t;
    }

    bool expect(Tok kind, std::string_view what)
    {
        const Token* t = peek();
        if (!t || t->kind != kind)
        {
            fail("expected " + std::string(what));
            return false;
        }
        ++pos_;
        return true;
    }

    std::vector<Item> items(bool lists = false)
    {
        std::vector<Item> out;
        while (const Token* t = peek())
        {
            if (t->kind != Tok::word || t->text.find('=') == std::string::npos)
                break;
            ++pos_;
            Item item;
            const auto eq = t->text.find('=');
            item.key = t->text.substr(0, eq);
            item.value = t->text.substr(eq + 1);
            item.column = t->column;
            item.value_column = t->column + eq + 1 + (t->quoted ? 1 : 0);
            item.list.push_back(item.value);
            item.list_columns.push_back(item.value_column);
            while (lists && !t->quoted)
            {
                const Token* comma = peek();
                if (!comma || comma->kind != Tok::comma || pos_ + 1 >= toks_.size())
                    break;
                const Token& v = toks_[pos_ + 1];
                if (v.kind != Tok::word || v.text.find('=') != std::string::npos)
                    break;
                pos_ += 2;
                item.list.push_back(v.text);
                item.list_columns.push_back(v.column);
            }
            out.push_back(std::move(item));
            if (const Token* sep = peek(); sep && sep->kind == Tok::comma)
                ++pos_;
        }
        return out;
    }

    bool finish()
    {
        if (at_end())
            return true;
        fail("unexpected '" + toks_[pos_].text + "'");
        return false;
    }

    void fail(std::string message)
    {
        const Token* t = peek();
        diags_.error(line_, column(), std::move(message), t ? t->text : std::string{});
    }

private:
    std::size_t end_column() const
    {
        if (toks_.empty())
            return 1;
        const Token& last = toks_.back();
        return last.column + last.text.size();
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    std::size_t line_;
    Diagnostics& diags_;
};

}  // namespace aramaid::detail
