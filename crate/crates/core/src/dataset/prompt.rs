use super::encoding::{EncodedInput, EncodingMode};
use super::DatasetError;

/// Default task instruction for a given input encoding.
pub fn default_instruction(input: &EncodedInput) -> String {
    match input.mode {
        EncodingMode::WithHighlights => format!(
            "In the reviews below, highlighted spans are marked between {} and {}. Write one coherent, \
             non-redundant passage that conveys all of the highlighted content and nothing else.",
            input.marker_open, input.marker_close
        ),
        EncodingMode::OnlyHighlights => {
            "Below are spans taken from several reviews. Write one coherent, non-redundant passage that \
             conveys all of their content and nothing else."
                .to_string()
        }
        EncodingMode::NoHighlights => "Write one coherent, non-redundant summary of the reviews below.".to_string(),
    }
}

/// Instruction header, `k` exemplar blocks, then the target with an empty
/// answer slot.
pub fn build_kshot_prompt(exemplars: &[(EncodedInput, String)], target: &EncodedInput, k: usize) -> Result<String, DatasetError> {
    build_kshot_prompt_with(&default_instruction(target), exemplars, target, k)
}

pub fn build_kshot_prompt_with(
    instruction: &str,
    exemplars: &[(EncodedInput, String)],
    target: &EncodedInput,
    k: usize,
) -> Result<String, DatasetError> {
    if k > exemplars.len() {
        return Err(DatasetError::NotEnoughExemplars { requested: k, available: exemplars.len() });
    }
    let mut prompt = format!("{instruction}\n\n");
    for (i, (input, fused)) in exemplars.iter().take(k).enumerate() {
        prompt.push_str(&format!("### Example {}\nInput:\n{}\nOutput:\n{}\n\n", i + 1, input.text, fused));
    }
    prompt.push_str(&format!("### Task\nInput:\n{}\nOutput:\n", target.text));
    Ok(prompt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(text: &str) -> EncodedInput {
        EncodedInput {
            mode: EncodingMode::WithHighlights,
            text: text.into(),
            marker_open: "<extra_token_1>".into(),
            marker_close: "<extra_token_2>".into(),
        }
    }

    #[test]
    fn zero_shot_has_header_and_target_only() {
        let p = build_kshot_prompt(&[(input("ex"), "fused".into())], &input("target"), 0).unwrap();
        assert!(!p.contains("### Example"));
        assert!(p.ends_with("### Task\nInput:\ntarget\nOutput:\n"));
        assert!(p.starts_with("In the reviews below"));
    }

    #[test]
    fn one_shot() {
        let p = build_kshot_prompt(&[(input("ex"), "fused".into())], &input("target"), 1).unwrap();
        assert_eq!(p.matches("### Example").count(), 1);
        assert!(p.contains("### Example 1\nInput:\nex\nOutput:\nfused\n\n### Task"));
        assert_eq!(p, build_kshot_prompt(&[(input("ex"), "fused".into())], &input("target"), 1).unwrap());
    }

    #[test]
    fn too_many_shots() {
        let err = build_kshot_prompt(&[(input("ex"), "fused".into())], &input("t"), 2).unwrap_err();
        assert!(matches!(err, DatasetError::NotEnoughExemplars { requested: 2, available: 1 }));
    }
}
