#include "heapstone/io.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace heapstone::io {

namespace fs = std::filesystem;

ParseError::ParseError(std::string f, int l, const std::string& what)
    : std::runtime_error(f + (l > 0 ? ":" + std::to_string(l) : std::string()) + ": " + what), file(std::move(f)), line(l)
{
}

const Value* Value::find(const std::string& key) const
{
    for (const auto& [k, v] : fields)
        if (k == key) return &v;
    return nullptr;
}

const Value& Value::at(const std::string& key) const
{
    if (const Value* v = find(key)) return *v;
    throw std::out_of_range(key);
}

namespace {

struct Token {
    enum Kind { Int, String, Name, Punct, End } kind;
    std::string text;
    int line;
};

class Lexer {
public:
    Lexer(const std::string& s, std::string file, int line) : s_(s), file_(std::move(file)), line_(line) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip();
            if (p_ >= s_.size()) break;
            char c = s_[p_];
            if (c == '"') {
                std::size_t q = s_.find('"', p_ + 1);
                if (q == std::string::npos) throw ParseError(file_, line_, "unterminated string");
                out.push_back({Token::String, s_.substr(p_ + 1, q - p_ - 1), line_});
                p_ = q + 1;
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && p_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_ + 1])))) {
                std::size_t q = p_ + 1;
                while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
                out.push_back({Token::Int, s_.substr(p_, q - p_), line_});
                p_ = q;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t q = p_ + 1;
                while (q < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[q])) || s_[q] == '_' || s_[q] == '-')) ++q;
                out.push_back({Token::Name, s_.substr(p_, q - p_), line_});
                p_ = q;
            } else if (std::string("{}[]():/^").find(c) != std::string::npos) {
                out.push_back({Token::Punct, std::string(1, c), line_});
                ++p_;
            } else {
                throw ParseError(file_, line_, std::string("unexpected character '") + c + "'");
            }
        }
        out.push_back({Token::End, "", line_});
        return out;
    }

private:
    void skip()
    {
        while (p_ < s_.size()) {
            char c = s_[p_];
            if (c == '\n') {
                ++line_;
                ++p_;
            } else if (c == '#') {
                while (p_ < s_.size() && s_[p_] != '\n') ++p_;
            } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                ++p_;
            } else {
                break;
            }
        }
    }
    const std::string& s_;
    std::string file_;
    std::size_t p_ = 0;
    int line_;
};

class Parser {
public:
    Parser(std::vector<Token> t, std::string file) : t_(std::move(t)), file_(std::move(file)) {}

    Value document()
    {
        Value v = value();
        if (peek().kind != Token::End) fail(peek(), "trailing input");
        return v;
    }

private:
    const Token& peek(std::size_t k = 0) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
    bool punct(const char* p, std::size_t k = 0) const { return peek(k).kind == Token::Punct && peek(k).text == p; }
    [[noreturn]] void fail(const Token& t, const std::string& what) const
    {
        throw ParseError(file_, t.line, what + (t.kind == Token::End ? " at end of input" : " near '" + t.text + "'"));
    }
    void expect(const char* p)
    {
        if (!punct(p)) fail(peek(), std::string("expected '") + p + "'");
        ++i_;
    }

    Value value()
    {
        const Token& t = peek();
        Value v;
        v.line = t.line;
        switch (t.kind) {
        case Token::Int:
            v.kind = Value::Kind::Int;
            v.integer = Integer(t.text);
            ++i_;
            return v;
        case Token::String:
            v.kind = Value::Kind::String;
            v.text = t.text;
            ++i_;
            return v;
        case Token::Name:
            ++i_;
            v.text = t.text;
            if (punct("/") || punct("^")) {
                v.text += peek().text;
                ++i_;
                if (peek().kind != Token::Int) fail(peek(), "expected an integer");
                v.text += peek().text;
                ++i_;
                v.kind = Value::Kind::Name;
            } else if (punct("{")) {
                record(v);
            } else if (punct("(")) {
                ++i_;
                v.kind = Value::Kind::Call;
                while (!punct(")")) {
                    if (peek().kind == Token::End) fail(peek(), "expected ')'");
                    v.items.push_back(value());
                }
                ++i_;
            } else {
                v.kind = Value::Kind::Name;
            }
            return v;
        case Token::Punct:
            if (t.text == "[") {
                ++i_;
                v.kind = Value::Kind::List;
                while (!punct("]")) {
                    if (peek().kind == Token::End) fail(peek(), "expected ']'");
                    v.items.push_back(value());
                }
                ++i_;
                return v;
            }
            if (t.text == "{") {
                record(v);
                return v;
            }
            break;
        case Token::End:
            break;
        }
        fail(t, "expected a value");
    }

    void record(Value& v)
    {
        expect("{");
        v.kind = Value::Kind::Record;
        while (!punct("}")) {
            const Token& k = peek();
            if (k.kind != Token::Name && k.kind != Token::Int) fail(k, "expected a key");
            ++i_;
            expect(":");
            for (const auto& f : v.fields)
                if (f.first == k.text) fail(k, "duplicate key");
            v.fields.emplace_back(k.text, value());
        }
        ++i_;
    }

    std::vector<Token> t_;
    std::string file_;
    std::size_t i_ = 0;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    if (!in) throw ParseError(p.string(), 0, "cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kHeader = "heapstone-v1";

}  // namespace

Value parse_document(const std::string& text, const std::string& file)
{
    // header: the first line that is neither blank nor a comment
    std::size_t p = 0;
    int line = 1;
    while (p < text.size()) {
        std::size_t e = text.find('\n', p);
        if (e == std::string::npos) e = text.size();
        std::string l = text.substr(p, e - p);
        auto b = l.find_first_not_of(" \t\r");
        if (b != std::string::npos && l[b] != '#') {
            auto last = l.find_last_not_of(" \t\r");
            if (l.substr(b, last - b + 1) != kHeader) throw ParseError(file, line, "expected header line '" + kHeader + "'");
            std::string rest = e < text.size() ? text.substr(e + 1) : "";
            return Parser(Lexer(rest, file, line + 1).run(), file).document();
        }
        p = e + 1;
        ++line;
    }
    throw ParseError(file, 0, "empty file");
}

Value read_document(const fs::path& p) { return parse_document(slurp(p), p.string()); }

Reader::Reader(fs::path file) : dir_(file.parent_path()), name_(file.string()) {}

void Reader::fail(const Value& v, const std::string& what) const { throw ParseError(name_, v.line, what); }

Integer Reader::integer(const Value& v) const
{
    if (v.kind != Value::Kind::Int) fail(v, "expected an integer");
    return v.integer;
}

int Reader::small_int(const Value& v) const
{
    Integer k = integer(v);
    if (k < -1000000 || k > 1000000) fail(v, "integer out of range");
    return static_cast<int>(k);
}

FGAbelianGroup Reader::group(const Value& v)
{
    std::size_t gens = 0;
    std::vector<IntVector> rels;
    if (v.kind == Value::Kind::Int && v.integer == 0) {
    } else if (v.kind == Value::Kind::Name && v.text == "Z") {
        gens = 1;
    } else if (v.kind == Value::Kind::Name && v.text.rfind("Z/", 0) == 0) {
        Integer m(v.text.substr(2));
        if (m < 2) fail(v, "cyclic order must be at least 2");
        gens = 1;
        rels.push_back({m});
    } else if (v.kind == Value::Kind::Name && v.text.rfind("Z^", 0) == 0) {
        gens = static_cast<std::size_t>(std::stoul(v.text.substr(2)));
    } else if (v.kind == Value::Kind::Record && v.text == "group") {
        const Value* g = v.find("gens");
        if (!g) fail(v, "group needs gens");
        int k = small_int(*g);
        if (k < 0) fail(*g, "negative generator count");
        gens = static_cast<std::size_t>(k);
        if (const Value* r = v.find("rels")) {
            if (r->kind != Value::Kind::List) fail(*r, "rels must be a list");
            for (const auto& row : r->items) {
                if (row.kind != Value::Kind::List || row.items.size() != gens) fail(row, "relation needs one entry per generator");
                IntVector rel;
                for (const auto& x : row.items) rel.push_back(integer(x));
                rels.push_back(rel);
            }
        }
    } else {
        fail(v, "expected a group (Z, Z/n, Z^r, 0 or group { ... })");
    }
    std::ostringstream key;
    key << gens;
    for (const auto& r : rels) {
        key << ";";
        for (const auto& x : r) key << x << ",";
    }
    auto it = groups_.find(key.str());
    if (it != groups_.end()) return it->second;
    IntMatrix m(gens, rels.size());
    for (std::size_t c = 0; c < rels.size(); ++c)
        for (std::size_t r = 0; r < gens; ++r) m(r, c) = rels[c][r];
    FGAbelianGroup g(gens, m);
    groups_.emplace(key.str(), g);
    return g;
}

fs::path Reader::resolve(const Value& v) const
{
    if (v.kind != Value::Kind::String) fail(v, "expected a file name");
    fs::path p(v.text);
    return p.is_absolute() ? p : dir_ / p;
}

namespace {

// Unreduced suspension of a set given by facets: cone on every simplex from
// two new vertices.
FiniteSSet suspend(const FiniteSSet& x)
{
    std::size_t nv = x.count(0);
    std::vector<std::vector<int>> facets;
    for (int d = 0; d <= x.dim(); ++d)
        for (const auto& s : x.simplices(d))
            for (std::size_t apex : {nv, nv + 1}) {
                std::vector<int> f;
                for (auto v : x.vertices(s)) f.push_back(static_cast<int>(v));
                f.push_back(static_cast<int>(apex));
                facets.push_back(f);
            }
    return from_facets(facets);
}

}  // namespace

FiniteSSet Reader::sset(const Value& v)
{
    try {
        if (v.kind == Value::Kind::String) return read_sset(resolve(v));
        if (v.is_name("point")) return point();
        if (v.kind == Value::Kind::Record && v.text == "sset") return parse_sset(v, *this);
        if (v.kind == Value::Kind::Call) {
            if ((v.text == "simplex" || v.text == "boundary") && v.items.size() == 1) {
                int n = small_int(v.items[0]);
                if (n < 0 || n > 12 || (v.text == "boundary" && n < 1)) fail(v, "dimension out of range");
                return v.text == "simplex" ? standard_simplex(n) : boundary(n);
            }
            if (v.text == "product" && v.items.size() >= 2) {
                std::vector<FiniteSSet> f;
                for (const auto& a : v.items) f.push_back(sset(a));
                return ProductSSet(f).sset();
            }
            if (v.text == "suspension" && v.items.size() == 1) {
                FiniteSSet x = sset(v.items[0]);
                if (!x.has_vertex_index()) fail(v, "suspension needs a set given by facets");
                return suspend(x);
            }
        }
    } catch (const std::invalid_argument& e) {
        fail(v, e.what());
    }
    fail(v, "expected a simplicial set (file name, point, simplex(n), boundary(n), product(...), suspension(x))");
}

Subcomplex Reader::subcomplex(const FiniteSSet& x, const Value& v) const
{
    if (v.is_name("empty")) return Subcomplex::empty(x);
    if (v.is_name("all")) return Subcomplex::full(x);
    if (v.kind != Value::Kind::List) fail(v, "expected empty, all or a list of [dim, id]");
    std::vector<Simplex> gens;
    for (const auto& g : v.items) {
        if (g.kind != Value::Kind::List || g.items.size() != 2) fail(g, "expected [dim, id]");
        int d = small_int(g.items[0]);
        Integer id = integer(g.items[1]);
        if (d < 0 || d > x.dim() || id < 0 || id >= x.count(d)) fail(g, "no such simplex");
        gens.push_back(Simplex::nondegenerate(d, static_cast<std::size_t>(id)));
    }
    return Subcomplex::generated_by(x, gens);
}

Cochain Reader::cochain(const FiniteSSet& x, const Value& v)
{
    if (v.kind != Value::Kind::Record || v.text != "cochain") fail(v, "expected cochain { ... }");
    const Value* d = v.find("degree");
    const Value* pi = v.find("pi");
    if (!d || !pi) fail(v, "cochain needs degree and pi");
    int deg = small_int(*d);
    if (deg < 0) fail(*d, "negative degree");
    FGAbelianGroup g = group(*pi);
    Cochain c = Cochain::zero(x, deg, g);
    if (const Value* vals = v.find("values")) {
        if (vals->kind != Value::Kind::List) fail(*vals, "values must be a list");
        for (const auto& e : vals->items) {
            if (e.kind != Value::Kind::List || e.items.size() != 2) fail(e, "expected [id, value]");
            Integer id = integer(e.items[0]);
            if (id < 0 || id >= c.size()) fail(e, "no such simplex");
            IntVector val;
            if (e.items[1].kind == Value::Kind::List)
                for (const auto& a : e.items[1].items) val.push_back(integer(a));
            else
                val.push_back(integer(e.items[1]));
            if (val.size() != g.n_generators()) fail(e, "value needs one entry per generator");
            c.set(static_cast<std::size_t>(id), val);
        }
    }
    return c;
}

FiniteSSet parse_sset(const Value& v, Reader& r)
{
    if (v.kind != Value::Kind::Record || v.text != "sset") r.fail(v, "expected sset { ... }");
    if (const Value* f = v.find("facets")) {
        if (f->kind != Value::Kind::List) r.fail(*f, "facets must be a list");
        std::vector<std::vector<int>> facets;
        for (const auto& s : f->items) {
            if (s.kind != Value::Kind::List || s.items.empty()) r.fail(s, "facet must be a nonempty vertex list");
            std::vector<int> vs;
            for (const auto& a : s.items) vs.push_back(r.small_int(a));
            facets.push_back(vs);
        }
        try {
            return from_facets(facets);
        } catch (const std::invalid_argument& e) {
            r.fail(*f, e.what());
        }
    }
    const Value* nv = v.find("vertices");
    if (!nv) r.fail(v, "sset needs vertices or facets");
    SSetBuilder b;
    int k = r.small_int(*nv);
    if (k < 0) r.fail(*nv, "negative vertex count");
    for (int i = 0; i < k; ++i) b.add_vertex();
    std::set<std::string> known = {"vertices"};
    for (int d = 1;; ++d) {
        const Value* cells = v.find("d" + std::to_string(d));
        if (!cells) break;
        known.insert("d" + std::to_string(d));
        if (cells->kind != Value::Kind::List) r.fail(*cells, "expected a list of simplices");
        for (const auto& s : cells->items) {
            if (s.kind != Value::Kind::List || static_cast<int>(s.items.size()) != d + 1)
                r.fail(s, "a " + std::to_string(d) + "-simplex needs " + std::to_string(d + 1) + " faces");
            std::vector<Simplex> faces;
            for (const auto& f : s.items) {
                std::vector<int> word;
                const Value* idv = &f;
                if (f.kind == Value::Kind::List) {
                    if (f.items.size() != 2 || f.items[0].kind != Value::Kind::List) r.fail(f, "expected [word, id]");
                    for (const auto& j : f.items[0].items) word.push_back(r.small_int(j));
                    idv = &f.items[1];
                }
                int base = d - 1 - static_cast<int>(word.size());
                Integer id = r.integer(*idv);
                if (base < 0 || id < 0 || id >= b.count(base)) r.fail(f, "face refers to a missing simplex");
                for (std::size_t a = 0; a < word.size(); ++a)
                    if (word[a] < 0 || word[a] > d - 2 - static_cast<int>(a) ||
                        (a > 0 && word[a] >= word[a - 1]))
                        r.fail(f, "degeneracy word must be decreasing and in range");
                faces.push_back(Simplex::from_word(static_cast<std::size_t>(id), base, word));
            }
            try {
                b.add_simplex(d, std::move(faces));
            } catch (const std::invalid_argument& e) {
                r.fail(s, e.what());
            }
        }
    }
    for (const auto& [key, val] : v.fields)
        if (!known.count(key)) r.fail(val, "unknown key " + key);
    FiniteSSet x = b.build(false);
    auto bad = x.validate();
    if (!bad.empty()) r.fail(v, "not a simplicial set: " + bad.front());
    return x;
}

FiniteSSet read_sset(const fs::path& p)
{
    Reader r(p);
    return parse_sset(read_document(p), r);
}

std::string write_sset(const FiniteSSet& x)
{
    std::ostringstream o;
    o << kHeader << "\nsset {\n  vertices: " << (x.dim() < 0 ? 0 : x.count(0)) << "\n";
    for (int d = 1; d <= x.dim(); ++d) {
        o << "  d" << d << ": [\n";
        for (std::size_t id = 0; id < x.count(d); ++id) {
            o << "    [";
            for (int i = 0; i <= d; ++i) {
                const Simplex& f = x.face_of(d, id, i);
                if (i) o << ", ";
                if (f.is_nondegenerate()) {
                    o << f.id;
                } else {
                    o << "[[";
                    auto w = f.degeneracy_word();
                    for (std::size_t a = 0; a < w.size(); ++a) o << (a ? ", " : "") << w[a];
                    o << "], " << f.id << "]";
                }
            }
            o << "]\n";
        }
        o << "  ]\n";
    }
    o << "}\n";
    return o.str();
}

namespace {

struct KScope {
    Reader& r;
    const std::vector<StageSpec>& below;
    const std::map<std::string, Cochain>& cochains;
    int degree;  // of the k-invariant being parsed
    FGAbelianGroup pi;
};

KExpr kexpr(const Value& v, KScope& s)
{
    Reader& r = s.r;
    auto args = [&](std::size_t n) {
        if (v.items.size() != n) r.fail(v, v.text + " takes " + std::to_string(n) + " arguments");
    };
    try {
        if (v.is_name("zero")) return KExpr::zero(s.degree, s.pi);
        if (v.kind == Value::Kind::Name && v.text.size() > 1 && v.text[0] == 'c' &&
            v.text.find_first_not_of("0123456789", 1) == std::string::npos) {
            int j = std::stoi(v.text.substr(1));
            if (j < 1 || j > static_cast<int>(s.below.size())) r.fail(v, "no earlier stage " + v.text);
            const StageSpec& st = s.below[j - 1];
            return KExpr::fib(j, st.n, st.pi);
        }
        if (v.kind != Value::Kind::Call) r.fail(v, "expected a k-invariant expression");
        const std::string& f = v.text;
        if (f == "base") {
            args(1);
            const Value& a = v.items[0];
            if (a.kind == Value::Kind::Name) {
                auto it = s.cochains.find(a.text);
                if (it == s.cochains.end()) r.fail(a, "unknown cochain " + a.text);
                return KExpr::base(it->second);
            }
            r.fail(a, "base takes a cochain name");
        }
        if (f == "delta") {
            args(1);
            return KExpr::coboundary(kexpr(v.items[0], s));
        }
        if (f == "mod") {
            args(2);
            return KExpr::mod(r.integer(v.items[0]), kexpr(v.items[1], s));
        }
        if (f == "cup" || f == "cup1") {
            args(2);
            return KExpr::cup_i(f == "cup" ? 0 : 1, kexpr(v.items[0], s), kexpr(v.items[1], s));
        }
        if (f == "cupi") {
            args(3);
            return KExpr::cup_i(r.small_int(v.items[0]), kexpr(v.items[1], s), kexpr(v.items[2], s));
        }
        if (f == "add") {
            if (v.items.size() < 2) r.fail(v, "add takes at least 2 arguments");
            KExpr e = kexpr(v.items[0], s);
            for (std::size_t i = 1; i < v.items.size(); ++i) e = KExpr::add(e, kexpr(v.items[i], s));
            return e;
        }
        if (f == "neg") {
            args(1);
            return KExpr::neg(kexpr(v.items[0], s));
        }
        if (f == "scale") {
            args(2);
            return KExpr::scale(r.integer(v.items[0]), kexpr(v.items[1], s));
        }
        if (f == "hom") {
            args(3);
            KExpr e = kexpr(v.items[2], s);
            FGAbelianGroup target = r.group(v.items[1]);
            const Value& m = v.items[0];
            if (m.kind != Value::Kind::List || m.items.size() != target.n_generators()) r.fail(m, "matrix needs one row per target generator");
            IntMatrix mat(target.n_generators(), e.group().n_generators());
            for (std::size_t i = 0; i < m.items.size(); ++i) {
                const Value& row = m.items[i];
                if (row.kind != Value::Kind::List || row.items.size() != e.group().n_generators())
                    r.fail(row, "row needs one entry per source generator");
                for (std::size_t j = 0; j < row.items.size(); ++j) mat(i, j) = r.integer(row.items[j]);
            }
            return KExpr::hom(GroupHom(e.group(), target, mat), e);
        }
        r.fail(v, "unknown operation " + f);
    } catch (const std::invalid_argument& e) {
        r.fail(v, e.what());
    }
}

}  // namespace

TowerFile parse_tower(const Value& v, Reader& r)
{
    if (v.kind != Value::Kind::Record || v.text != "tower") r.fail(v, "expected tower { ... }");
    for (const auto& [key, val] : v.fields)
        if (key != "base" && key != "cochains" && key != "stages" && key != "suspension") r.fail(val, "unknown key " + key);
    const Value* bv = v.find("base");
    const Value* sv = v.find("stages");
    if (!bv || !sv) r.fail(v, "tower needs base and stages");
    FiniteSSet base = r.sset(*bv);
    std::map<std::string, Cochain> cochains;
    if (const Value* cv = v.find("cochains")) {
        if (cv->kind != Value::Kind::Record) r.fail(*cv, "cochains must be a record of name: cochain");
        for (const auto& [name, c] : cv->fields) cochains.emplace(name, r.cochain(base, c));
    }
    if (sv->kind != Value::Kind::List || sv->items.empty()) r.fail(*sv, "stages must be a nonempty list");
    std::vector<StageSpec> stages;
    for (const auto& st : sv->items) {
        if (st.kind != Value::Kind::Record) r.fail(st, "expected { n, pi, k }");
        const Value* n = st.find("n");
        const Value* pi = st.find("pi");
        if (!n || !pi) r.fail(st, "stage needs n and pi");
        int deg = r.small_int(*n);
        if (deg < 1) r.fail(*n, "stage degree must be positive");
        if (!stages.empty() && deg <= stages.back().n) r.fail(*n, "stage degrees must increase");
        FGAbelianGroup g = r.group(*pi);
        KScope scope{r, stages, cochains, deg + 1, g};
        Value zero;
        zero.kind = Value::Kind::Name;
        zero.text = "zero";
        const Value* kv = st.find("k");
        KExpr k = kexpr(kv ? *kv : zero, scope);
        if (k.degree() != deg + 1) r.fail(kv ? *kv : st, "k-invariant has degree " + std::to_string(k.degree()) + ", expected " + std::to_string(deg + 1));
        if (!same_presentation(k.group(), g)) r.fail(kv ? *kv : st, "k-invariant has the wrong coefficients");
        stages.push_back(StageSpec{deg, g, k});
    }
    TowerFile out;
    try {
        out.tower = std::make_shared<Tower>(base, stages);
    } catch (const std::invalid_argument& e) {
        r.fail(v, e.what());
    }
    if (const Value* s = v.find("suspension")) out.suspension = read_tower(r.resolve(*s)).tower;
    return out;
}

TowerFile read_tower(const fs::path& p)
{
    Reader r(p);
    return parse_tower(read_document(p), r);
}

Job read_job(const fs::path& p)
{
    Value v = read_document(p);
    Reader r(p);
    if (v.kind != Value::Kind::Record || v.text != "problem") r.fail(v, "expected problem { ... }");
    Job j;
    for (const auto& [key, val] : v.fields) {
        if (key == "X") j.x = val;
        else if (key == "A") j.a = val;
        else if (key == "g") j.g = val;
        else if (key == "f") j.f = val;
        else if (key == "tower") j.tower_path = r.resolve(val);
        else r.fail(val, "unknown key " + key);
    }
    if (!v.find("X")) r.fail(v, "problem needs X");
    auto name = [](const char* n) {
        Value d;
        d.kind = Value::Kind::Name;
        d.text = n;
        return d;
    };
    if (!v.find("A")) j.a = name("empty");
    if (!v.find("g")) j.g = name("constant");
    if (!v.find("f")) j.f = name("zero");
    return j;
}

LiftingProblem make_job_problem(const Job& j, const Tower& t, const fs::path& job_file)
{
    Reader r(job_file);
    const FiniteSSet& b = t.base();
    auto space = [&](const Value& v) { return v.is_name("base") ? b : r.sset(v); };

    FiniteSSet x;
    SimplicialMap g;
    const Value& gv = j.g;
    bool projection = gv.kind == Value::Kind::Call && gv.text == "projection";
    if (projection) {
        if (j.x.kind != Value::Kind::Call || j.x.text != "product") r.fail(gv, "projection needs X = product(...)");
        std::vector<FiniteSSet> f;
        for (const auto& a : j.x.items) f.push_back(space(a));
        ProductSSet prod(f);
        if (gv.items.size() != 1) r.fail(gv, "projection takes 1 argument");
        int i = r.small_int(gv.items[0]);
        if (i < 0 || i >= static_cast<int>(f.size())) r.fail(gv, "no such factor");
        if (!f[i].same_as(b)) r.fail(gv, "the projected factor must be base");
        x = prod.sset();
        g = prod.projection(static_cast<std::size_t>(i));
    } else {
        x = space(j.x);
        try {
            if (gv.is_name("constant") || (gv.kind == Value::Kind::Call && gv.text == "constant")) {
                int v0 = gv.items.empty() ? 0 : r.small_int(gv.items[0]);
                if (v0 < 0 || static_cast<std::size_t>(v0) >= b.count(0)) r.fail(gv, "no such base vertex");
                g = SimplicialMap::constant(x, b, static_cast<std::size_t>(v0));
            } else if (gv.is_name("identity")) {
                if (!x.same_as(b)) r.fail(gv, "identity needs X = base");
                g = SimplicialMap::identity(b);
            } else if (gv.kind == Value::Kind::Call && gv.text == "vertices") {
                if (gv.items.size() != 1 || gv.items[0].kind != Value::Kind::List) r.fail(gv, "vertices takes a list");
                const auto& img = gv.items[0].items;
                if (img.size() != x.count(0)) r.fail(gv, "vertices needs one image per vertex of X");
                if (!b.has_vertex_index()) r.fail(gv, "vertices needs a base given by facets");
                std::vector<std::size_t> to;
                for (const auto& a : img) {
                    int w = r.small_int(a);
                    if (w < 0 || static_cast<std::size_t>(w) >= b.count(0)) r.fail(a, "no such base vertex");
                    to.push_back(static_cast<std::size_t>(w));
                }
                g = SimplicialMap::from_function(x, b, [&](const Simplex& s) {
                    std::vector<std::size_t> seq;
                    for (auto v : x.vertices(s)) seq.push_back(to[v]);
                    return b.nerve_simplex(seq);
                });
            } else {
                r.fail(gv, "expected constant(v), identity, projection(i) or vertices([...])");
            }
        } catch (const std::invalid_argument& e) {
            r.fail(gv, std::string("g is not a simplicial map: ") + e.what());
        }
    }
    auto bad = g.validate();
    if (!bad.empty()) r.fail(gv, "g is not a simplicial map: " + bad.front());

    Subcomplex a = r.subcomplex(x, j.a);
    auto pair = PairContext::make(x, a);
    if (j.f.is_name("zero")) return make_problem(pair, g, t);
    if (j.f.kind != Value::Kind::List || static_cast<int>(j.f.items.size()) != t.height())
        r.fail(j.f, "f needs one cochain per stage");
    StageMap f{g, {}};
    for (int l = 1; l <= t.height(); ++l) {
        const Value& cv = j.f.items[l - 1];
        Cochain c = r.cochain(x, cv);
        if (c.degree() != t.stage(l).n || !same_presentation(c.coefficients(), t.stage(l).pi))
            r.fail(cv, "cochain does not match stage " + std::to_string(l));
        f.coords.push_back(relabel(c, t.stage(l).pi));
    }
    return make_problem(pair, g, t, f);
}

}  // namespace heapstone::io
