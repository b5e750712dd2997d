#include "resfault/product_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "resfault/strutil.hpp"

namespace resfault {

using py::Stmt;
using py::SyntaxUnit;
using py::Token;
using py::TokKind;

namespace {

constexpr double kPathCap = 1e6;

bool is_decl_kw(std::string_view kw) {
    return kw == "def" || kw == "class" || kw == "import" || kw == "from" ||
           kw == "global" || kw == "nonlocal";
}

bool is_unit_kw(std::string_view kw) { return kw == "def" || kw == "class"; }

// Own scope: statement subtree minus nested def/class bodies (their headers
// still count as statements of the enclosing scope).
void visit_own(const Stmt& s, int depth, bool is_root,
               const std::function<void(const Stmt&, int)>& fn) {
    fn(s, depth);
    if (!is_root && is_unit_kw(s.head_kw())) return;
    for (const Stmt& c : s.body) visit_own(c, depth + 1, false, fn);
}

void visit_all(const Stmt& s, int depth, const std::function<void(const Stmt&, int)>& fn) {
    fn(s, depth);
    for (const Stmt& c : s.body) visit_all(c, depth + 1, fn);
}

// 'if' tokens past position 0 are ternaries or comprehension filters; the
// leading 'if' of an if/elif header is structural.
int count_expr_ifs(const std::vector<Token>& tokens) {
    int n = 0;
    for (size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].kind == TokKind::Keyword && tokens[i].text == "if") ++n;
    }
    return n;
}

double expr_mult(const std::vector<Token>& tokens) {
    double m = 1.0;
    for (int i = 0; i < count_expr_ifs(tokens); ++i) m = std::min(m * 2.0, kPathCap);
    return m;
}

double np_suite(const std::vector<Stmt>& stmts);

double np_body(const Stmt& s) { return np_suite(s.body); }

// Structured path-count estimate: branches add, sequences multiply, loops
// contribute body-or-skip, expression-level conditionals double their
// statement. Saturates at kPathCap.
double np_suite(const std::vector<Stmt>& stmts) {
    double result = 1.0;
    size_t i = 0;
    const size_t n = stmts.size();
    auto clamp = [](double v) { return std::min(v, kPathCap); };
    while (i < n) {
        const Stmt& s = stmts[i];
        std::string_view kw = s.head_kw();
        if (is_unit_kw(kw)) {
            result = clamp(result * expr_mult(s.head));
            ++i;
            continue;
        }
        if (kw == "if") {
            double mult = expr_mult(s.head);
            double branches = np_body(s);
            bool has_else = false;
            size_t j = i + 1;
            while (j < n) {
                std::string_view k2 = stmts[j].head_kw();
                if (k2 == "elif") {
                    mult = clamp(mult * expr_mult(stmts[j].head));
                    branches = clamp(branches + np_body(stmts[j]));
                    ++j;
                } else if (k2 == "else") {
                    branches = clamp(branches + np_body(stmts[j]));
                    has_else = true;
                    ++j;
                    break;
                } else {
                    break;
                }
            }
            result = clamp(result * clamp(mult * clamp(branches + (has_else ? 0.0 : 1.0))));
            i = j;
            continue;
        }
        if (kw == "for" || kw == "while") {
            double mult = expr_mult(s.head);
            double body = np_body(s);
            double alt = 1.0;
            size_t j = i + 1;
            if (j < n && stmts[j].head_kw() == "else") {
                alt = np_body(stmts[j]);
                ++j;
            }
            result = clamp(result * clamp(mult * clamp(body + alt)));
            i = j;
            continue;
        }
        if (kw == "try") {
            double try_np = np_body(s);
            double handlers = 0.0;
            double else_np = 1.0, fin_np = 1.0;
            size_t j = i + 1;
            while (j < n) {
                std::string_view k2 = stmts[j].head_kw();
                if (k2 == "except") {
                    handlers = clamp(handlers + expr_mult(stmts[j].head) * np_body(stmts[j]));
                } else if (k2 == "else") {
                    else_np = np_body(stmts[j]);
                } else if (k2 == "finally") {
                    fin_np = np_body(stmts[j]);
                } else {
                    break;
                }
                ++j;
            }
            result = clamp(result * clamp(clamp(try_np * else_np + handlers) * fin_np));
            i = j;
            continue;
        }
        if (s.compound) {  // with, unmodeled soft-keyword blocks
            result = clamp(result * clamp(expr_mult(s.head) * np_suite(s.body)));
            ++i;
            continue;
        }
        result = clamp(result * expr_mult(s.head));
        ++i;
    }
    return result;
}

struct LineClasses {
    int total = 0, blank = 0, comment_only = 0, mixed = 0;
    int decl = 0;
    int code() const { return total - blank - comment_only; }
};

// Classify physical lines; a line belongs to the statement whose head starts
// it (declaration statements claim their header/continuation lines).
LineClasses classify_lines(const py::LexResult& lx, const std::vector<Stmt>& stmts) {
    LineClasses out;
    out.total = static_cast<int>(lx.lines.size());
    std::vector<int> owner(lx.lines.size(), 0);  // 0 unset, 1 decl, 2 exec
    std::function<void(const Stmt&)> mark = [&](const Stmt& s) {
        int kind = is_decl_kw(s.head_kw()) ? 1 : 2;
        if (!s.head.empty()) {
            int from = s.head.front().line, to = s.head.back().end_line;
            for (int l = from; l <= to && static_cast<size_t>(l) <= owner.size(); ++l) {
                if (l >= 1 && owner[l - 1] == 0) owner[l - 1] = kind;
            }
        }
        for (const Stmt& c : s.body) mark(c);
    };
    for (const Stmt& s : stmts) mark(s);

    for (size_t l = 0; l < lx.lines.size(); ++l) {
        const auto& info = lx.lines[l];
        if (!info.has_code && !info.has_comment) {
            ++out.blank;
        } else if (!info.has_code) {
            ++out.comment_only;
        } else {
            if (info.has_comment) ++out.mixed;
            if (owner[l] == 1) ++out.decl;
        }
    }
    return out;
}

void halstead_tokens(const Stmt& s, bool is_root, std::vector<const Token*>& out) {
    for (const Token& t : s.head) out.push_back(&t);
    if (!is_root && is_unit_kw(s.head_kw())) return;
    for (const Stmt& c : s.body) halstead_tokens(c, false, out);
}

double ratio_or_zero(double num, double den) { return den > 0 ? num / den : 0.0; }

double numeric_literal_value(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != '_') t += c;
    if (!t.empty() && (t.back() == 'j' || t.back() == 'J')) t.pop_back();
    if (t.size() > 2 && t[0] == '0') {
        char b = static_cast<char>(std::tolower(static_cast<unsigned char>(t[1])));
        if (b == 'x') return static_cast<double>(std::strtoll(t.c_str() + 2, nullptr, 16));
        if (b == 'o') return static_cast<double>(std::strtoll(t.c_str() + 2, nullptr, 8));
        if (b == 'b') return static_cast<double>(std::strtoll(t.c_str() + 2, nullptr, 2));
    }
    return std::strtod(t.c_str(), nullptr);
}

bool is_upper_const_name(const std::string& s) {
    bool has_alpha = false;
    for (char c : s) {
        if (std::islower(static_cast<unsigned char>(c))) return false;
        if (std::isupper(static_cast<unsigned char>(c))) has_alpha = true;
    }
    return has_alpha;
}

// The `def`/`class` statement of a re-parsed unit fragment, or null.
const Stmt* fragment_root(const py::ParseResult& pr, std::string_view kw) {
    for (const Stmt& s : pr.statements) {
        if (s.head_kw() == kw) return &s;
    }
    return nullptr;
}

}  // namespace

MethodMetrics method_metrics(const SyntaxUnit& unit) {
    MethodMetrics m;
    if (unit.kind != py::UnitKind::Method) return m;
    py::ParseResult pr = py::parse_source(unit.body_text);
    const Stmt* root = fragment_root(pr, "def");
    if (!root) return m;

    // --- structural counts over the method's own scope ---
    int branch_tokens = 0;
    int stmt_count = 0, dstmt_count = 0;
    int exits = 0;
    std::vector<const Stmt*> exit_stmts;
    std::set<std::string> returns;
    int mnd = 0;

    visit_own(*root, 0, true, [&](const Stmt& s, int depth) {
        ++stmt_count;
        if (is_decl_kw(s.head_kw())) ++dstmt_count;
        if (s.compound && depth > 0) mnd = std::max(mnd, depth);
        if (!s.head.empty() && s.head[0].kind == TokKind::Keyword &&
            (s.head[0].text == "return" || s.head[0].text == "raise")) {
            ++exits;
            exit_stmts.push_back(&s);
            if (s.head[0].text == "return") {
                std::string expr;
                for (size_t k = 1; k < s.head.size(); ++k) {
                    if (!expr.empty()) expr += ' ';
                    expr += s.head[k].text;
                }
                returns.insert(expr.empty() ? "None" : expr);
            }
        }
        for (const Token& t : s.head) {
            if (t.kind != TokKind::Keyword) continue;
            if (t.text == "elif" || t.text == "for" || t.text == "while" ||
                t.text == "except" || t.text == "and" || t.text == "or") {
                ++branch_tokens;
            } else if (t.text == "if") {
                ++branch_tokens;  // statement, ternary and comprehension alike
            }
        }
    });
    m.cc = 1 + branch_tokens;
    m.mnd = mnd;
    m.np = expr_mult(root->head) * np_suite(root->body);
    m.np = std::min(m.np, kPathCap);
    m.stmt = stmt_count;
    m.dstmt = dstmt_count;
    m.estmt = stmt_count - dstmt_count;
    m.nin = static_cast<double>(unit.params.size());
    m.nout = static_cast<double>(returns.size());
    m.ne = exits;

    // early exits: an exit is early unless it belongs to the final statement
    // of the method's direct body
    int early = 0;
    if (!root->body.empty()) {
        int final_start = root->body.back().start_line;
        for (const Stmt* e : exit_stmts) {
            if (e->start_line < final_start) ++early;
        }
    }
    m.nee = early;

    // --- Halstead over own-scope tokens ---
    std::vector<const Token*> toks;
    halstead_tokens(*root, true, toks);
    std::set<std::string> op_set, operand_set;
    int n_ops = 0, n_operands = 0;
    for (const Token* t : toks) {
        switch (t->kind) {
            case TokKind::Keyword:
            case TokKind::Op:
                op_set.insert(t->text);
                ++n_ops;
                break;
            case TokKind::Ident:
            case TokKind::Number:
            case TokKind::String:
                operand_set.insert(t->text);
                ++n_operands;
                break;
            default:
                break;
        }
    }
    m.hdop = static_cast<double>(op_set.size());
    m.hdnd = static_cast<double>(operand_set.size());
    m.htop = n_ops;
    m.htoa = n_operands;
    m.hv = m.hdop + m.hdnd;
    m.hl = m.htop + m.htoa;
    m.hvol = m.hv > 0 ? m.hl * std::log2(m.hv) : 0.0;
    m.hd = m.hdnd > 0 ? (m.hdop / 2.0) * (m.htoa / m.hdnd) : 0.0;
    m.heff = m.hd * m.hvol;

    // --- line families over the full physical span ---
    LineClasses lc = classify_lines(pr.lex, pr.statements);
    m.loc = lc.total;
    m.bloc = lc.blank;
    m.comloc = lc.comment_only;
    m.dloc = lc.decl;
    m.eloc = lc.code() - lc.decl;
    m.clwb = lc.mixed;
    m.ccr = ratio_or_zero(m.comloc, lc.code());
    m.ccr_b = ratio_or_zero(m.clwb, lc.code());

    m.hmi = 171.0 - 5.2 * std::log(std::max(m.hvol, 1.0)) - 0.23 * m.cc -
            16.2 * std::log(std::max(m.loc, 1.0));
    m.hmi = std::clamp(m.hmi, 0.0, 171.0);
    return m;
}

ClassMetrics class_metrics(const SyntaxUnit& unit, const ProjectIndex& index,
                           const std::string& file_path) {
    ClassMetrics c;
    if (unit.kind != py::UnitKind::Class) return c;
    py::ParseResult pr = py::parse_source(unit.body_text);
    const Stmt* root = fragment_root(pr, "class");

    LineClasses lc = classify_lines(pr.lex, pr.statements);
    c.clloc = lc.total;
    c.ccode = lc.code();
    c.cdloc = lc.decl;
    c.celoc = lc.code() - lc.decl;
    c.ccom = lc.comment_only;
    c.ccr_c = ratio_or_zero(c.ccom, c.ccode);

    // methods: declared = direct children, total = subtree
    int direct = 0, total = 0;
    std::function<void(const SyntaxUnit&)> count = [&](const SyntaxUnit& u) {
        for (const auto& ch : u.children) {
            if (ch.kind == py::UnitKind::Method) ++total;
            count(ch);
        }
    };
    count(unit);
    for (const auto& ch : unit.children)
        if (ch.kind == py::UnitKind::Method) ++direct;
    c.nom = total;
    c.nom_a = direct;

    // instance variables: class-level bindings plus self.<name> targets in
    // __init__
    std::set<std::string> ivars;
    if (root) {
        for (const Stmt& s : root->body) {
            if (s.compound || s.head.empty()) continue;
            int depth = 0;
            size_t eq = s.head.size();
            for (size_t k = 0; k < s.head.size(); ++k) {
                if (s.head[k].kind == TokKind::Op) {
                    const std::string& t = s.head[k].text;
                    if (t == "(" || t == "[" || t == "{") ++depth;
                    if (t == ")" || t == "]" || t == "}") --depth;
                    if (depth == 0 && t == "=") {
                        eq = k;
                        break;
                    }
                }
            }
            if (eq == s.head.size()) continue;
            bool rhs_lambda = eq + 1 < s.head.size() &&
                              s.head[eq + 1].kind == TokKind::Keyword &&
                              s.head[eq + 1].text == "lambda";
            if (rhs_lambda) continue;
            depth = 0;
            for (size_t k = 0; k < eq; ++k) {
                const Token& t = s.head[k];
                if (t.kind == TokKind::Op) {
                    if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                    if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                }
                if (depth == 0 && t.kind == TokKind::Ident &&
                    (k == 0 || s.head[k - 1].text != ".")) {
                    ivars.insert(t.text);
                }
            }
        }
    }
    for (const auto& ch : unit.children) {
        if (ch.kind != py::UnitKind::Method || ch.name != "__init__") continue;
        py::ParseResult init = py::parse_source(ch.body_text);
        const Stmt* init_root = fragment_root(init, "def");
        if (!init_root) continue;
        visit_all(*init_root, 0, [&](const Stmt& s, int) {
            const auto& toks = s.head;
            int depth = 0;
            size_t assign = toks.size();
            for (size_t k = 0; k < toks.size(); ++k) {
                if (toks[k].kind == TokKind::Op) {
                    const std::string& t = toks[k].text;
                    if (t == "(" || t == "[" || t == "{") ++depth;
                    if (t == ")" || t == "]" || t == "}") --depth;
                    if (depth == 0 &&
                        (t == "=" || (t.size() >= 2 && t.back() == '=' && t != "==" &&
                                      t != "!=" && t != "<=" && t != ">="))) {
                        assign = k;
                        break;
                    }
                }
            }
            if (assign == toks.size()) return;
            for (size_t k = 0; k + 2 < toks.size() && k + 2 < assign; ++k) {
                if (toks[k].kind == TokKind::Ident && toks[k].text == "self" &&
                    toks[k + 1].kind == TokKind::Op && toks[k + 1].text == "." &&
                    toks[k + 2].kind == TokKind::Ident) {
                    ivars.insert(toks[k + 2].text);
                }
            }
        });
    }
    c.niv = static_cast<double>(ivars.size());

    c.bcs = static_cast<double>(unit.bases.size());
    int idx = index.find_class(file_path, unit.qualified_name);
    if (idx >= 0) {
        c.dit = index.classes()[idx].dit;
        c.dcs = index.classes()[idx].dcs;
    } else {
        c.dit = 1;  // object-rooted
    }
    return c;
}

FileMetrics file_metrics(const SyntaxUnit& root) {
    FileMetrics f;
    if (root.kind != py::UnitKind::File) return f;
    py::ParseResult pr = py::parse_source(root.body_text);

    LineClasses lc = classify_lines(pr.lex, pr.statements);
    f.f_tloc = lc.total;
    f.f_bloc = lc.blank;
    f.f_comloc = lc.comment_only;
    f.f_cloc = lc.code();
    f.f_ccr = ratio_or_zero(f.f_comloc, f.f_cloc);

    int stmt_count = 0, dstmt_count = 0, max_depth = 0;
    for (const Stmt& s : pr.statements) {
        visit_all(s, 1, [&](const Stmt& st, int depth) {
            ++stmt_count;
            if (is_decl_kw(st.head_kw())) ++dstmt_count;
            if (st.compound) max_depth = std::max(max_depth, depth);
        });
    }
    f.f_stmt = stmt_count;
    f.f_dstmt = dstmt_count;
    f.f_estmt = stmt_count - dstmt_count;
    f.f_mnd = max_depth;

    double cc_sum = 0, np_sum = 0;
    std::function<void(const SyntaxUnit&)> walk = [&](const SyntaxUnit& u) {
        for (const auto& ch : u.children) {
            if (ch.kind == py::UnitKind::Method) {
                MethodMetrics m = method_metrics(ch);
                cc_sum += m.cc;
                np_sum += m.np;
            }
            walk(ch);
        }
    };
    walk(pr.root);
    f.f_cc = cc_sum;
    f.f_nplog = std::log10(1.0 + np_sum);
    return f;
}

PySpecificMetrics python_specific(const SyntaxUnit& unit) {
    PySpecificMetrics p;
    py::ParseResult pr = py::parse_source(unit.body_text);

    // syntactic block depth: module statements sit at depth 0, a unit
    // fragment's own header at depth 0 and its body at depth 1
    int max_depth = 0;
    for (const Stmt& s : pr.statements) {
        visit_all(s, 0, [&](const Stmt&, int depth) { max_depth = std::max(max_depth, depth); });
    }
    p.pmi = max_depth;

    // magic numbers: value outside {0,1,2}, excluding module-level
    // UPPER_CASE constant assignments
    std::set<const Token*> exempt;
    if (unit.kind == py::UnitKind::File) {
        for (const Stmt& s : pr.statements) {
            if (s.head.empty() || s.compound) continue;
            if (s.head[0].kind != TokKind::Ident || !is_upper_const_name(s.head[0].text))
                continue;
            bool has_eq = false;
            for (const Token& t : s.head)
                if (t.kind == TokKind::Op && t.text == "=") has_eq = true;
            if (!has_eq) continue;
            for (const Token& t : s.head)
                if (t.kind == TokKind::Number) exempt.insert(&t);
        }
    }
    int magic = 0;
    std::function<void(const Stmt&)> scan = [&](const Stmt& s) {
        for (const Token& t : s.head) {
            if (t.kind != TokKind::Number || exempt.count(&t)) continue;
            double v = numeric_literal_value(t.text);
            if (v != 0.0 && v != 1.0 && v != 2.0) ++magic;
        }
        for (const Stmt& c : s.body) scan(c);
    };
    for (const Stmt& s : pr.statements) scan(s);
    p.pmn = magic;
    return p;
}

void coupling_metrics(const ProjectIndex& index, const std::string& file_path,
                      const SyntaxUnit& method, MethodMetrics* out) {
    int idx = index.find_method(file_path, method.qualified_name);
    if (idx < 0) return;
    out->fo = static_cast<double>(index.callees_of(idx).size());
    out->fi = static_cast<double>(index.callers_of(idx).size());
    out->cr = out->fi;
}

// ---------------------------------------------------------------------------
// ProjectIndex

int ProjectIndex::find_method(const std::string& file, const std::string& qualified) const {
    auto it = methods_by_key_.find(file + "::" + qualified);
    return it == methods_by_key_.end() ? -1 : it->second;
}

int ProjectIndex::find_class(const std::string& file, const std::string& qualified) const {
    auto it = classes_by_key_.find(file + "::" + qualified);
    return it == classes_by_key_.end() ? -1 : it->second;
}

int ProjectIndex::resolve_class(const std::string& from_file,
                                const std::string& base_name) const {
    std::string bare = base_name;
    if (auto pos = bare.rfind('.'); pos != std::string::npos) bare = bare.substr(pos + 1);
    auto it = classes_by_bare_.find(bare);
    if (it == classes_by_bare_.end()) return -1;
    int same_file = -1;
    for (int idx : it->second) {
        if (classes_[static_cast<size_t>(idx)].file == from_file) {
            if (same_file >= 0) return same_file;  // first same-file wins
            same_file = idx;
        }
    }
    if (same_file >= 0) return same_file;
    return it->second.size() == 1 ? it->second[0] : -1;
}

void ProjectIndex::compute_hierarchy() {
    const size_t n = classes_.size();
    std::vector<int> state(n, 0);  // 0 unvisited, 1 visiting, 2 done
    std::function<int(int)> dit_of = [&](int idx) -> int {
        ClassRef& c = classes_[static_cast<size_t>(idx)];
        if (state[static_cast<size_t>(idx)] == 2) return c.dit;
        if (state[static_cast<size_t>(idx)] == 1) return 1;  // cycle guard
        state[static_cast<size_t>(idx)] = 1;
        int best = 1;  // implicit object or external base
        for (const std::string& b : c.bases) {
            int r = resolve_class(c.file, b);
            best = std::max(best, r >= 0 && r != idx ? 1 + dit_of(r) : 1);
        }
        c.dit = best;
        state[static_cast<size_t>(idx)] = 2;
        return best;
    };
    for (size_t i = 0; i < n; ++i) dit_of(static_cast<int>(i));
    for (size_t i = 0; i < n; ++i) {
        for (const std::string& b : classes_[i].bases) {
            int r = resolve_class(classes_[i].file, b);
            if (r >= 0 && r != static_cast<int>(i)) ++classes_[static_cast<size_t>(r)].dcs;
        }
    }
}

ProjectIndex ProjectIndex::build(
    const std::vector<std::pair<std::string, std::string>>& files) {
    ProjectIndex pi;
    struct PendingMethod {
        int idx;
        std::string body;
    };
    std::vector<PendingMethod> pending;

    for (const auto& [path, source] : files) {
        py::ParseResult pr = py::parse_source(source);
        for (const SyntaxUnit* u : py::all_units(pr.root)) {
            if (u->kind == py::UnitKind::Method) {
                int idx = static_cast<int>(pi.methods_.size());
                pi.methods_.push_back({path, u->qualified_name, u->name});
                pi.methods_by_bare_[u->name].push_back(idx);
                pi.methods_by_key_[path + "::" + u->qualified_name] = idx;
                pending.push_back({idx, u->body_text});
            } else if (u->kind == py::UnitKind::Class) {
                int idx = static_cast<int>(pi.classes_.size());
                pi.classes_.push_back({path, u->qualified_name, u->name, u->bases, 1, 0});
                pi.classes_by_bare_[u->name].push_back(idx);
                pi.classes_by_key_[path + "::" + u->qualified_name] = idx;
            }
        }
    }
    pi.compute_hierarchy();

    pi.calls_out_.assign(pi.methods_.size(), {});
    pi.calls_in_.assign(pi.methods_.size(), {});
    for (const auto& pm : pending) {
        py::ParseResult pr = py::parse_source(pm.body);
        const Stmt* root = fragment_root(pr, "def");
        if (!root) continue;
        std::vector<const Token*> toks;
        halstead_tokens(*root, true, toks);
        for (size_t k = 0; k + 1 < toks.size(); ++k) {
            if (toks[k]->kind != TokKind::Ident) continue;
            if (k > 0 && toks[k - 1]->kind == TokKind::Keyword &&
                (toks[k - 1]->text == "def" || toks[k - 1]->text == "class"))
                continue;
            if (toks[k + 1]->kind == TokKind::Op && toks[k + 1]->text == "(") {
                auto it = pi.methods_by_bare_.find(toks[k]->text);
                if (it == pi.methods_by_bare_.end()) continue;
                for (int callee : it->second) {
                    if (callee == pm.idx) continue;  // self-recursion excluded
                    pi.calls_out_[static_cast<size_t>(pm.idx)].insert(callee);
                    pi.calls_in_[static_cast<size_t>(callee)].insert(pm.idx);
                }
            }
        }
    }
    return pi;
}

// ---------------------------------------------------------------------------
// catalog

const std::vector<std::string>& product_metric_names() {
    static const std::vector<std::string> names = {
        "CC",    "MND",   "NP",     "HD",     "HL",      "HV",      "HVOL",
        "HEFF",  "HMI",   "HDOP",   "HDND",   "HTOP",    "HTOA",    "LOC",
        "BLOC",  "DLOC",  "ELOC",   "STMT",   "DSTMT",   "ESTMT",   "NIN",
        "NOUT",  "NE",    "NEE",    "COMLOC", "CCR",     "CLWB",    "CCR-B",
        "FI",    "FO",    "CR",     "CLLOC",  "CCODE",   "CDLOC",   "CELOC",
        "NOM",   "NOM-A", "NIV",    "CCOM",   "CCR-C",   "DIT",     "BCs",
        "DCs",   "F-CC",  "F-MND",  "F-NPLOG", "F-TLOC", "F-CLOC",  "F-BLOC",
        "F-STMT", "F-DSTMT", "F-ESTMT", "F-COMLOC", "F-CCR", "PMI", "PMN"};
    return names;
}

const std::vector<std::string>& process_metric_names() {
    static const std::vector<std::string> names = {
        "AGE",  "BD",   "FC",   "ACCH", "MCCH", "TCCH", "TMS",  "TC",   "CMC",
        "MCLC", "ACLC", "TCC",  "CCA",  "CCD",  "CPC",  "MCA",  "MCD",  "TMC",
        "AMLC", "MMLC", "DA",   "ADE",  "DCN",  "ACA",  "ACCA"};
    return names;
}

const std::vector<std::string>& feature_catalog() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> all = product_metric_names();
        all.push_back("ENT");
        const auto& proc = process_metric_names();
        all.insert(all.end(), proc.begin(), proc.end());
        return all;
    }();
    return names;
}

std::vector<double> product_vector(const MethodMetrics& m, const ClassMetrics* cls,
                                   const FileMetrics& f, const PySpecificMetrics& py) {
    ClassMetrics zero;
    const ClassMetrics& c = cls ? *cls : zero;
    return {m.cc,     m.mnd,    m.np,      m.hd,      m.hl,      m.hv,     m.hvol,
            m.heff,   m.hmi,    m.hdop,    m.hdnd,    m.htop,    m.htoa,   m.loc,
            m.bloc,   m.dloc,   m.eloc,    m.stmt,    m.dstmt,   m.estmt,  m.nin,
            m.nout,   m.ne,     m.nee,     m.comloc,  m.ccr,     m.clwb,   m.ccr_b,
            m.fi,     m.fo,     m.cr,      c.clloc,   c.ccode,   c.cdloc,  c.celoc,
            c.nom,    c.nom_a,  c.niv,     c.ccom,    c.ccr_c,   c.dit,    c.bcs,
            c.dcs,    f.f_cc,   f.f_mnd,   f.f_nplog, f.f_tloc,  f.f_cloc, f.f_bloc,
            f.f_stmt, f.f_dstmt, f.f_estmt, f.f_comloc, f.f_ccr, py.pmi,   py.pmn};
}

int product_presence_mask(bool has_class) { return 1 | (has_class ? 2 : 0) | 4; }

}  // namespace resfault
