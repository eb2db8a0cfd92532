#pragma once

// File formats: complexes and cuts as JSON, Hilbert models as JSON, sparse
// operators as sorted coordinate text, experiment reports as canonical JSON
// whose bytes depend only on the data (doubles always via format_double).

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hfent/complex.hpp"
#include "hfent/hilbert.hpp"
#include "hfent/models.hpp"

namespace hfent {

// 17 significant digits: enough to round-trip any double, stable across runs.
std::string format_double(double x);

// Insertion-ordered JSON emission; the only writer reports go through.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(const std::string& s);
    JsonWriter& value(const char* s);
    JsonWriter& value(double x);
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(int v);
    JsonWriter& value(bool b);
    const std::string& str() const { return out_; }

  private:
    void separate();
    std::string out_;
    std::vector<char> stack_;  // 'o' / 'a', with a parallel "has items" bit
    std::vector<bool> dirty_;
    bool expecting_value_ = false;
};

std::string json_escape(const std::string& s);

// {"name", "counts", "boundary": {"n": [[[face, coeff], ...], ...]}} or the
// vertex-tuple form {"name", "simplices": {"n": [[v...], ...]}}.
DeltaComplex complex_from_json(const std::string& text);

struct CutSpec {
    int p = 0;
    std::vector<int> A_faces;
    std::vector<int> A_psimplices;
};
CutSpec cut_from_json(const std::string& text);

// {"complex": name-or-path, "p", "group", "p_sites": optional per-simplex
// character index lists, "p1_sites": optional per-simplex element index
// lists}; omitted site lists mean the regular basis.
HilbertModel model_from_json(const std::string& text,
                             std::int64_t dim_cap = default_dim_cap());

// Library name if it matches the roster, file path otherwise.
std::shared_ptr<const DeltaComplex> resolve_complex(const std::string& name_or_path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// One line per stored entry: "row col re im", sorted by (row, col).
std::string coo_text(const SparseOp& op);

std::string sum_rule_report_json(const SumRuleReport& rep);
std::string sum_rule_report_csv(const SumRuleReport& rep);

}  // namespace hfent
