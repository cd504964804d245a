def reverse_text(text):
    out = ''
    for ch in text:
        out = out + ch
    return text
