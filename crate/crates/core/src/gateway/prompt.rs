/// Zero-shot NLI prompt used by raw-text entailment backends.
///
/// Texts are inserted verbatim, newlines included.
pub fn render_nli_prompt(premise: &str, hypothesis: &str) -> String {
    format!(
        "### Instruction: Read the following and determine if the hypothesis can be inferred from the premise.\n\
         Options: Entailment, Contradiction, or Neutral\n\
         \n\
         ### Input:\n\
         Premise:  {premise}\n\
         Hypothesis: {hypothesis}\n\
         \n\
         ### Response (choose only one of the options from above):"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_template() {
        let expected = "### Instruction: Read the following and determine if the hypothesis can be inferred from the premise.\n\
Options: Entailment, Contradiction, or Neutral\n\
\n\
### Input:\n\
Premise:  A.\n\
Hypothesis: B.\n\
\n\
### Response (choose only one of the options from above):";
        assert_eq!(render_nli_prompt("A.", "B."), expected);
        assert!(render_nli_prompt("A.", "B.").lines().any(|l| l == "Options: Entailment, Contradiction, or Neutral"));
    }

    #[test]
    fn newlines_preserved_and_deterministic() {
        let p = render_nli_prompt("line one\nline two", "h");
        assert!(p.contains("Premise:  line one\nline two\nHypothesis: h"));
        assert_eq!(p, render_nli_prompt("line one\nline two", "h"));
    }
}
