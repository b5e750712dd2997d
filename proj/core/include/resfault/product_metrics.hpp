#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "resfault/pysource.hpp"

namespace resfault {

// Method-level product metrics. Structural counts (CC, NP, statement and
// Halstead families, exits) cover the method's own scope: nested def/class
// headers count as statements of the enclosing method, their bodies do not.
// Line-based counts (LOC family) cover the full physical span.
struct MethodMetrics {
    double cc = 0, mnd = 0, np = 0;
    double hd = 0, hl = 0, hv = 0, hvol = 0, heff = 0, hmi = 0;
    double hdop = 0, hdnd = 0, htop = 0, htoa = 0;
    double loc = 0, bloc = 0, dloc = 0, eloc = 0;
    double stmt = 0, dstmt = 0, estmt = 0;
    double nin = 0, nout = 0, ne = 0, nee = 0;
    double comloc = 0, ccr = 0, clwb = 0, ccr_b = 0;
    double fi = 0, fo = 0, cr = 0;
};

struct ClassMetrics {
    double clloc = 0, ccode = 0, cdloc = 0, celoc = 0;
    double nom = 0, nom_a = 0, niv = 0;
    double ccom = 0, ccr_c = 0;
    double dit = 0, bcs = 0, dcs = 0;
};

struct FileMetrics {
    double f_cc = 0, f_mnd = 0, f_nplog = 0;
    double f_tloc = 0, f_cloc = 0, f_bloc = 0;
    double f_stmt = 0, f_dstmt = 0, f_estmt = 0;
    double f_comloc = 0, f_ccr = 0;
};

struct PySpecificMetrics {
    double pmi = 0, pmn = 0;
};

// Cross-file index for Fan-In/Fan-Out, DIT, BCs/DCs. Built once per commit
// snapshot over every parseable file, read-only afterwards.
class ProjectIndex {
public:
    struct MethodRef {
        std::string file;
        std::string qualified;
        std::string bare;
    };
    struct ClassRef {
        std::string file;
        std::string qualified;
        std::string bare;
        std::vector<std::string> bases;
        int dit = 1;
        int dcs = 0;
    };

    static ProjectIndex build(const std::vector<std::pair<std::string, std::string>>& files);

    int find_method(const std::string& file, const std::string& qualified) const;
    int find_class(const std::string& file, const std::string& qualified) const;

    const std::vector<MethodRef>& methods() const { return methods_; }
    const std::vector<ClassRef>& classes() const { return classes_; }
    const std::set<int>& callees_of(int method_idx) const { return calls_out_[method_idx]; }
    const std::set<int>& callers_of(int method_idx) const { return calls_in_[method_idx]; }

private:
    std::vector<MethodRef> methods_;
    std::vector<ClassRef> classes_;
    std::map<std::string, std::vector<int>> methods_by_bare_;
    std::map<std::string, int> methods_by_key_;
    std::map<std::string, std::vector<int>> classes_by_bare_;
    std::map<std::string, int> classes_by_key_;
    std::vector<std::set<int>> calls_out_;
    std::vector<std::set<int>> calls_in_;

    int resolve_class(const std::string& from_file, const std::string& base_name) const;
    void compute_hierarchy();
    friend struct IndexBuilder;
};

MethodMetrics method_metrics(const py::SyntaxUnit& unit);
ClassMetrics class_metrics(const py::SyntaxUnit& unit, const ProjectIndex& index,
                           const std::string& file_path);
FileMetrics file_metrics(const py::SyntaxUnit& root);
PySpecificMetrics python_specific(const py::SyntaxUnit& unit);

// Fills fi/fo/cr on a method row from the project call graph.
void coupling_metrics(const ProjectIndex& index, const std::string& file_path,
                      const py::SyntaxUnit& method, MethodMetrics* out);

// Catalog order used by every artifact that carries feature columns.
const std::vector<std::string>& product_metric_names();  // 56
const std::vector<std::string>& process_metric_names();  // 25
const std::vector<std::string>& feature_catalog();       // product + ENT + process

// Flattened product row in catalog order; class slice zeroed when absent.
std::vector<double> product_vector(const MethodMetrics& m, const ClassMetrics* cls,
                                   const FileMetrics& f, const PySpecificMetrics& py);
// bit0 = method, bit1 = class context present, bit2 = file
int product_presence_mask(bool has_class);

}  // namespace resfault
