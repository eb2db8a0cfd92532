#include "hfent/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hfent/error.hpp"

namespace hfent {

using nlohmann::json;

std::string format_double(double x) {
    if (!std::isfinite(x)) throw domain_error("non-finite value in report");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string json_escape(const std::string& s) {
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
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

void JsonWriter::separate() {
    if (!stack_.empty() && stack_.back() == 'a') {
        if (dirty_.back()) out_ += ',';
        dirty_.back() = true;
    }
}

JsonWriter& JsonWriter::begin_object() {
    separate();
    out_ += '{';
    stack_.push_back('o');
    dirty_.push_back(false);
    expecting_value_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    stack_.pop_back();
    dirty_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separate();
    out_ += '[';
    stack_.push_back('a');
    dirty_.push_back(false);
    expecting_value_ = false;
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    stack_.pop_back();
    dirty_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    if (dirty_.back()) out_ += ',';
    dirty_.back() = true;
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    expecting_value_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
    separate();
    out_ += '"';
    out_ += json_escape(s);
    out_ += '"';
    expecting_value_ = false;
    return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value(double x) {
    separate();
    out_ += format_double(x);
    expecting_value_ = false;
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
    separate();
    out_ += std::to_string(v);
    expecting_value_ = false;
    return *this;
}

JsonWriter& JsonWriter::value(int v) { return value(static_cast<std::int64_t>(v)); }

JsonWriter& JsonWriter::value(bool b) {
    separate();
    out_ += b ? "true" : "false";
    expecting_value_ = false;
    return *this;
}

namespace {

json parse_or_throw(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw domain_error(std::string(what) + ": invalid JSON: " + e.what());
    }
}

int dim_key(const std::string& k, const char* what) {
    try {
        std::size_t pos = 0;
        const int d = std::stoi(k, &pos);
        if (pos != k.size() || d < 0) throw std::invalid_argument(k);
        return d;
    } catch (const std::exception&) {
        throw domain_error(std::string(what) + ": dimension key '" + k + "' is not a number");
    }
}

}  // namespace

DeltaComplex complex_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "complex file");
    if (!j.is_object()) throw domain_error("complex file: top level must be an object");
    const std::string name = j.value("name", std::string("custom"));

    if (j.contains("simplices")) {
        const auto& s = j.at("simplices");
        if (!s.is_object()) throw domain_error("complex file: simplices must map dim to tuples");
        int maxd = -1;
        for (const auto& item : s.items()) maxd = std::max(maxd, dim_key(item.key(), "complex file"));
        if (maxd < 0) throw domain_error("complex file: simplices is empty");
        std::vector<std::vector<std::vector<int>>> simp(static_cast<std::size_t>(maxd) + 1);
        try {
            for (const auto& item : s.items())
                simp[static_cast<std::size_t>(dim_key(item.key(), "complex file"))] =
                    item.value().get<std::vector<std::vector<int>>>();
        } catch (const json::exception& e) {
            throw domain_error(std::string("complex file: bad simplex tuple: ") + e.what());
        }
        return complex_from_simplices(name, simp);
    }

    std::vector<int> counts;
    try {
        counts = j.at("counts").get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw domain_error(std::string("complex file: bad counts: ") + e.what());
    }
    if (j.contains("dimension") &&
        j.at("dimension").get<int>() != static_cast<int>(counts.size()) - 1)
        throw domain_error("complex file: dimension disagrees with counts");

    std::vector<std::vector<std::vector<FaceEntry>>> bnd(counts.size());
    if (j.contains("boundary")) {
        const auto& b = j.at("boundary");
        if (!b.is_object()) throw domain_error("complex file: boundary must map dim to lists");
        for (const auto& item : b.items()) {
            const int n = dim_key(item.key(), "complex file");
            if (n < 1 || n >= static_cast<int>(counts.size()))
                throw domain_error("complex file: boundary dimension " + item.key() +
                                   " out of range");
            std::vector<std::vector<FaceEntry>> rows;
            try {
                for (const auto& simplex : item.value()) {
                    std::vector<FaceEntry> fe;
                    for (const auto& pair : simplex) {
                        if (!pair.is_array() || pair.size() != 2)
                            throw domain_error("complex file: boundary entries are [face, coeff]");
                        fe.push_back({pair[0].get<int>(), pair[1].get<std::int64_t>()});
                    }
                    rows.push_back(std::move(fe));
                }
            } catch (const json::exception& e) {
                throw domain_error(std::string("complex file: bad boundary entry: ") + e.what());
            }
            bnd[static_cast<std::size_t>(n)] = std::move(rows);
        }
    }
    DeltaComplex X(name, counts, std::move(bnd));
    if (j.contains("labels")) {
        try {
            std::vector<std::vector<std::vector<int>>> labels(counts.size());
            for (const auto& item : j.at("labels").items())
                labels[static_cast<std::size_t>(dim_key(item.key(), "complex file"))] =
                    item.value().get<std::vector<std::vector<int>>>();
            X.set_labels(std::move(labels));
        } catch (const json::exception& e) {
            throw domain_error(std::string("complex file: bad labels: ") + e.what());
        }
    }
    return X;
}

CutSpec cut_from_json(const std::string& text) {
    const json j = parse_or_throw(text, "cut file");
    CutSpec c;
    try {
        c.p = j.at("p").get<int>();
        c.A_faces = j.value("A_faces", std::vector<int>{});
        c.A_psimplices = j.value("A_psimplices", std::vector<int>{});
    } catch (const json::exception& e) {
        throw domain_error(std::string("cut file: ") + e.what());
    }
    return c;
}

std::shared_ptr<const DeltaComplex> resolve_complex(const std::string& name_or_path) {
    try {
        return std::make_shared<const DeltaComplex>(library_complex(name_or_path));
    } catch (const Error&) {
        // fall through to the file form
    }
    return std::make_shared<const DeltaComplex>(complex_from_json(read_text_file(name_or_path)));
}

HilbertModel model_from_json(const std::string& text, std::int64_t dim_cap) {
    const json j = parse_or_throw(text, "model file");
    std::string complex_ref;
    int p = 0;
    std::string group;
    try {
        complex_ref = j.at("complex").get<std::string>();
        p = j.at("p").get<int>();
        group = j.at("group").get<std::string>();
    } catch (const json::exception& e) {
        throw domain_error(std::string("model file: ") + e.what());
    }
    auto X = resolve_complex(complex_ref);
    FiniteAbelianGroup G = parse_group_spec(group);
    if (!j.contains("p_sites") && !j.contains("p1_sites"))
        return HilbertModel::regular(X, G, p, dim_cap);

    std::vector<std::vector<Character>> pb;
    std::vector<std::vector<GroupElement>> p1b;
    try {
        if (j.contains("p_sites")) {
            for (const auto& site : j.at("p_sites")) {
                std::vector<Character> basis;
                for (const auto& idx : site) basis.push_back(G.character(idx.get<std::int64_t>()));
                pb.push_back(std::move(basis));
            }
        } else {
            pb.assign(static_cast<std::size_t>(X->count(p)), G.enumerate_characters());
        }
        if (j.contains("p1_sites")) {
            for (const auto& site : j.at("p1_sites")) {
                std::vector<GroupElement> basis;
                for (const auto& idx : site) basis.push_back(G.element(idx.get<std::int64_t>()));
                p1b.push_back(std::move(basis));
            }
        } else {
            p1b.assign(static_cast<std::size_t>(X->count(p + 1)), G.enumerate_elements());
        }
    } catch (const json::exception& e) {
        throw domain_error(std::string("model file: bad site list: ") + e.what());
    }
    return HilbertModel::custom(X, G, p, std::move(pb), std::move(p1b), dim_cap);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw domain_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw domain_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw domain_error("write failed for '" + path + "'");
}

std::string coo_text(const SparseOp& op) {
    struct Entry {
        std::int64_t r, c;
        std::complex<double> v;
    };
    std::vector<Entry> entries;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseOp::InnerIterator it(op, k); it; ++it)
            if (it.value() != std::complex<double>(0.0, 0.0))
                entries.push_back({it.row(), it.col(), it.value()});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    std::string out;
    for (const auto& e : entries) {
        out += std::to_string(e.r);
        out += ' ';
        out += std::to_string(e.c);
        out += ' ';
        out += format_double(e.v.real());
        out += ' ';
        out += format_double(e.v.imag());
        out += '\n';
    }
    return out;
}

std::string sum_rule_report_json(const SumRuleReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("model").value(rep.model);
    w.key("complex").value(rep.complex_name);
    w.key("cut").value(rep.cut_name);
    w.key("group").value(rep.group);
    w.key("p").value(rep.p);
    w.key("mv_holds").value(rep.mv_holds);
    w.key("criterion_failed").value(rep.criterion_failed);
    w.key("tol").value(rep.tol);
    w.key("max_abs_residual").value(rep.max_abs_residual);
    w.key("rows").begin_array();
    for (const auto& r : rep.rows) {
        w.begin_object();
        w.key("energy").value(r.energy);
        w.key("s_coupled").value(r.s_coupled);
        w.key("s_matter").value(r.s_matter);
        w.key("s_gauge").value(r.s_gauge);
        w.key("residual").value(r.residual);
        w.end_object();
    }
    w.end_array();
    w.key("notes").begin_array();
    for (const auto& n : rep.notes) w.value(n);
    w.end_array();
    w.key("seed").value(static_cast<std::int64_t>(rep.seed));
    w.key("runtime_seconds").value(rep.runtime_seconds);
    w.key("pass").value(rep.pass);
    w.end_object();
    return w.str();
}

std::string sum_rule_report_csv(const SumRuleReport& rep) {
    std::string out = "energy,s_coupled,s_matter,s_gauge,residual\n";
    for (const auto& r : rep.rows) {
        out += format_double(r.energy);
        out += ',';
        out += format_double(r.s_coupled);
        out += ',';
        out += format_double(r.s_matter);
        out += ',';
        out += format_double(r.s_gauge);
        out += ',';
        out += format_double(r.residual);
        out += '\n';
    }
    return out;
}

}  // namespace hfent
