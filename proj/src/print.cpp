#include "gcwn/model.hpp"

namespace gcwn {

namespace {

void print_sumterm(std::string& out, const Process& p) {
  if (p->kind == ProcNode::Kind::Sum) {
    out += '(';
    print_process(out, p);
    out += ')';
  } else {
    print_process(out, p);
  }
}

}  // namespace

void print_process(std::string& out, const Process& p) {
  switch (p->kind) {
    case ProcNode::Kind::Nil: out += '0'; return;
    case ProcNode::Kind::Input:
      out += p->channel.name;
      out += '(';
      out += p->binder;
      out += ").";
      print_sumterm(out, p->children[0]);
      return;
    case ProcNode::Kind::Output:
      out += p->channel.name;
      out += "!(";
      print_expr(out, p->expr);
      out += ").";
      print_sumterm(out, p->children[0]);
      return;
    case ProcNode::Kind::Sum:
      print_process(out, p->children[0]);
      out += " + ";
      print_sumterm(out, p->children[1]);
      return;
    case ProcNode::Kind::If:
      out += "if ";
      print_expr(out, p->expr);
      out += " then ";
      print_sumterm(out, p->children[0]);
      out += " else ";
      print_sumterm(out, p->children[1]);
      return;
    case ProcNode::Kind::Call:
      out += p->constant;
      if (!p->args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < p->args.size(); ++i) {
          if (i) out += ", ";
          print_expr(out, p->args[i]);
        }
        out += ')';
      }
      if (!p->relabel.empty()) {
        out += '[';
        for (std::size_t i = 0; i < p->relabel.size(); ++i) {
          if (i) out += ", ";
          out += p->relabel[i].second.name;
          out += '/';
          out += p->relabel[i].first.name;
        }
        out += ']';
      }
      return;
  }
}

std::string to_string(const Process& p) {
  std::string out;
  print_process(out, p);
  return out;
}

}  // namespace gcwn
