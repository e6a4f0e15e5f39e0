#pragma once

#include "cpn/morphism.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cpn {

// Line-oriented text formats; '#' starts a comment. Nets (.pnet):
//
//   net NAME
//   mode strict|relaxed [empty]
//   transition T bindings B1 B2 ...
//   place P tokens C1 C2 ...
//   adjacent P T
//   arc -|+ T.B P.C W
//   marking P.C N
//
// Morphisms (.pmor) refer to their nets by file name, relative to the .pmor:
//
//   morphism NAME
//   source FILE
//   target FILE
//   ring z|q
//   node X -> Y
//   flowbasis A: NAME = k1*T1.B1 + k2*T2.B2
//   flowmap A: NAME -> k*B + ...
//   markmap U: X.C -> k*C + ...
//
// Winskel morphisms between place/transition nets:
//
//   winskel NAME
//   source FILE
//   target FILE
//   beta P -> k*Q + ...
//   eta T -> U

/// Strictness from the command line beats the `mode` line of the file.
struct ReadOptions {
    std::optional<bool> strict;
};

ColouredNet parse_net(const std::string& text, const ReadOptions& opts = {});
/// Comments are written as leading '#' lines.
std::string serialize_net(const ColouredNet& net, const std::vector<std::string>& comments = {});

/// Resolves a source/target reference to a net.
using NetLoader = std::function<ColouredNet(const std::string& ref)>;

NetMorphism parse_morphism(const std::string& text, const NetLoader& load);
std::string serialize_morphism(const NetMorphism& m, const std::string& source_ref, const std::string& target_ref);

WinskelMorphism parse_winskel(const std::string& text, const NetLoader& load);
std::string serialize_winskel(const WinskelMorphism& w, const std::string& source_ref, const std::string& target_ref);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
ColouredNet read_net(const std::string& path, const ReadOptions& opts = {});
/// Net references are resolved relative to the directory of `path`; each file is read once.
NetMorphism read_morphism(const std::string& path, const ReadOptions& opts = {});
WinskelMorphism read_winskel(const std::string& path, const ReadOptions& opts = {});

/// Same names, colours, adjacency, incidence, strictness and initial marking.
bool same_net_data(const ColouredNet& a, const ColouredNet& b);

} // namespace cpn
