#include "teamsim/tdp/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace teamsim::tdp {
namespace {

enum class Tok { ident, string, integer, punct, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += advance();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::integer;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    t.text += advance();
                }
            } else if (c == '"') {
                t.kind = Tok::string;
                advance();
                for (;;) {
                    if (pos_ >= src_.size() || src_[pos_] == '\n') {
                        throw SyntaxError(t.line, t.col, "unterminated string");
                    }
                    char d = advance();
                    if (d == '"') break;
                    t.text += d;
                }
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                t.kind = Tok::punct;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view("{}[]();,:").find(c) != std::string_view::npos) {
                t.kind = Tok::punct;
                t.text = std::string(1, advance());
            } else {
                throw SyntaxError(t.line, t.col, std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Pattern run() {
        expect_word("pattern");
        p_.name = expect_ident("pattern name");
        expect("{");
        while (!peek_is("}")) {
            if (peek().kind == Tok::end) fail(peek(), "expected '}' before end of input");
            declaration();
        }
        if (p_.actors.empty()) fail(peek(), "pattern declares no actors");
        expect("}");
        if (peek().kind != Tok::end) fail(peek(), "unexpected input after pattern");
        resolve();
        return std::move(p_);
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool peek_is(std::string_view punct) const {
        return peek().kind == Tok::punct && peek().text == punct;
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw SyntaxError(t.line, t.col, msg + (t.kind == Tok::end ? " (at end of input)" : ", found '" + t.text + "'"));
    }

    void expect(std::string_view punct) {
        if (!peek_is(punct)) fail(peek(), "expected '" + std::string(punct) + "'");
        take();
    }

    void expect_word(std::string_view word) {
        if (peek().kind != Tok::ident || peek().text != word) fail(peek(), "expected '" + std::string(word) + "'");
        take();
    }

    std::string expect_ident(std::string_view what) {
        if (peek().kind != Tok::ident) fail(peek(), "expected " + std::string(what));
        return take().text;
    }

    void declaration() {
        const Token& head = peek();
        if (head.kind != Tok::ident) fail(head, "expected a declaration");
        if (head.text == "actors") {
            take();
            expect(":");
            do {
                actor();
            } while (accept(","));
            expect(";");
        } else if (head.text == "tasks") {
            take();
            expect(":");
            do {
                std::string task = expect_ident("task name");
                if (p_.has_task(task)) throw DuplicateName("task", task);
                p_.tasks.push_back(std::move(task));
            } while (accept(","));
            expect(";");
        } else if (head.text == "state") {
            take();
            state();
        } else if (head.text == "transition") {
            take();
            transition();
        } else if (head.text == "initial") {
            take();
            p_.initial_declarations.push_back(expect_ident("state name"));
            expect(";");
        } else {
            fail(head, "expected actors, tasks, state, transition or initial");
        }
    }

    bool accept(std::string_view punct) {
        if (!peek_is(punct)) return false;
        take();
        return true;
    }

    void actor() {
        const Token& kind = peek();
        ActorDecl decl;
        if (kind.kind == Tok::ident && kind.text == "human") {
            decl.actor_class = ActorClass::human;
        } else if (kind.kind == Tok::ident && kind.text == "agent") {
            decl.actor_class = ActorClass::agent;
        } else {
            fail(kind, "expected 'human' or 'agent'");
        }
        take();
        decl.id = expect_ident("actor name");
        if (p_.find_actor(decl.id)) throw DuplicateName("actor", decl.id);
        p_.actors.push_back(std::move(decl));
    }

    void state() {
        PatternState s;
        s.name = expect_ident("state name");
        if (p_.find_state(s.name)) throw DuplicateName("state", s.name);
        if (peek().kind == Tok::ident && peek().text == "handover") {
            take();
            s.is_handover = true;
        }
        expect("{");
        while (!accept("}")) {
            const Token& head = peek();
            if (head.kind != Tok::ident) fail(head, "expected allocate, interventions or dwell");
            if (head.text == "allocate") {
                take();
                Allocation a;
                a.actor = expect_ident("actor name");
                expect("->");
                a.task = expect_ident("task name");
                expect("[");
                const Token& w = peek();
                if (w.kind == Tok::ident && w.text == "direct") {
                    a.work = Work::direct;
                } else if (w.kind == Tok::ident && w.text == "indirect") {
                    a.work = Work::indirect;
                } else {
                    fail(w, "expected 'direct' or 'indirect'");
                }
                take();
                expect("]");
                expect(";");
                for (const auto& prior : s.allocations) {
                    if (prior.actor == a.actor && prior.task == a.task) {
                        throw DuplicateName("allocation", s.name + ": " + a.actor + " -> " + a.task);
                    }
                }
                s.allocations.push_back(std::move(a));
            } else if (head.text == "interventions") {
                take();
                std::string actor = expect_ident("actor name");
                expect(":");
                if (s.interventions.contains(actor)) {
                    throw DuplicateName("interventions", s.name + ": " + actor);
                }
                InterventionSet set;
                do {
                    std::string name = expect_ident("intervention");
                    auto iv = parse_intervention(name);
                    if (!iv) throw UnknownReference("intervention", name);
                    set.insert(*iv);
                } while (accept(","));
                expect(";");
                s.interventions.emplace(std::move(actor), std::move(set));
            } else if (head.text == "dwell") {
                take();
                expect(":");
                const Token& n = peek();
                if (n.kind != Tok::integer) fail(n, "expected a positive integer");
                int ticks = 0;
                auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), ticks);
                if (ec != std::errc{} || ticks < 1) fail(n, "dwell must be a positive integer");
                take();
                expect("->");
                std::string target = expect_ident("state name");
                expect(";");
                if (s.dwell) throw DuplicateName("dwell", s.name);
                s.dwell = Dwell{ticks, std::move(target)};
            } else {
                fail(head, "expected allocate, interventions or dwell");
            }
        }
        p_.states.push_back(std::move(s));
    }

    void transition() {
        Transition t;
        t.from = expect_ident("state name");
        expect("->");
        t.to = expect_ident("state name");
        expect_word("on");
        const Token& kind = peek();
        if (kind.kind == Tok::ident && kind.text == "command") {
            t.trigger.kind = TriggerKind::command;
        } else if (kind.kind == Tok::ident && kind.text == "request") {
            t.trigger.kind = TriggerKind::request;
        } else {
            fail(kind, "expected 'command' or 'request'");
        }
        take();
        expect("(");
        if (peek().kind != Tok::string) fail(peek(), "expected a string");
        t.trigger.name = take().text;
        expect(")");
        expect(";");
        p_.transitions.push_back(std::move(t));
    }

    void require_state(const std::string& name) const {
        if (!p_.find_state(name)) throw UnknownReference("state", name);
    }

    void resolve() const {
        for (const auto& s : p_.states) {
            for (const auto& a : s.allocations) {
                if (!p_.find_actor(a.actor)) throw UnknownReference("actor", a.actor);
                if (!p_.has_task(a.task)) throw UnknownReference("task", a.task);
            }
            for (const auto& [actor, set] : s.interventions) {
                const ActorDecl* decl = p_.find_actor(actor);
                if (!decl) throw UnknownReference("actor", actor);
                if (decl->actor_class != ActorClass::human) throw UnknownReference("human", actor);
            }
            if (s.dwell) require_state(s.dwell->target);
        }
        std::set<std::pair<std::string, Trigger>> seen;
        for (const auto& t : p_.transitions) {
            require_state(t.from);
            require_state(t.to);
            if (!seen.emplace(t.from, t.trigger).second) throw DuplicateTrigger(t.from, to_string(t.trigger));
        }
        for (const auto& init : p_.initial_declarations) require_state(init);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Pattern p_;
};

}  // namespace

Pattern parse_pattern(std::string_view text) { return Parser(Lexer(text).run()).run(); }

}  // namespace teamsim::tdp
